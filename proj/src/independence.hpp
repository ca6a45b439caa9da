#pragma once

#include <cstdint>
#include <vector>

#include "grouped_data.hpp"

namespace gco {

enum class TestKind { hsic_gamma, nlcorr };
enum class IndependenceMode { hsic_gamma, nlcorr };

struct IndependenceResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestKind kind = TestKind::hsic_gamma;
};

// Joint independence test between the column samples of u (p x m) and
// v (q x m): biased HSIC with Gaussian kernels, bandwidth by the median
// heuristic per input (subsampled to 1000 points above m = 1000), p-value
// from the moment-matched gamma approximation under the null. Requires
// m >= 20; constant input (zero median distance) is a degenerate-input
// error.
IndependenceResult hsic_test(const Matrix& u, const Matrix& v);

// Same statistic, p-value from a seeded permutation null. Validation
// fallback for the gamma approximation.
IndependenceResult hsic_test_permutation(const Matrix& u, const Matrix& v,
                                         int permutations,
                                         std::uint64_t seed);

// Scalar nonlinear-correlation test: standardizes both inputs, correlates
// g(u) with v and u with g(v), Fisher-z two-sided p-values, Bonferroni over
// the two directions. Symmetric in its arguments. The nonlinearity
// defaults to tanh; pass another contrast to override.
using Nonlinearity = double (*)(double);
IndependenceResult nlcorr_test(const Vector& u, const Vector& v,
                               Nonlinearity g);
IndependenceResult nlcorr_test(const Vector& u, const Vector& v);

// Fisher's statistic -sum log p. p-values of exactly 0 are clamped to
// 1e-300; values outside [0, 1] are errors.
double fisher_combine(const std::vector<double>& p_values);

// One p-value for dependence between group block Xj and residual block
// Rij. HSIC mode runs the joint test. NLCORR mode pools per-direction
// Fisher-z p-values over all variable pairs through Fisher's statistic
// (chi-square with 2*#directions dof; dependence across the pooled values
// is ignored, an approximation). Directions per pair: the plain
// correlation (skipped when numerically zero, as it is for OLS residuals
// against their regressors) and the two nonlinear ones, corr(g(u)^, v) and
// corr(u, g(v)^) with g = tanh and ^ the removal of the in-sample
// projection onto the own block's row span. The removal matters: an OLS
// residual is exactly orthogonal to the regressor span, so raw tanh
// correlations are far over-dispersed against the Fisher-z null and the
// pooled p-value saturates at 1. A (near-)constant residual row counts as
// independent of everything and is skipped. With a single pair, returns
// the nlcorr_test p-value unchanged.
double group_independence(const Matrix& xj, const Matrix& rij,
                          IndependenceMode mode);

inline constexpr double kPValueFloor = 1e-300;

}  // namespace gco
