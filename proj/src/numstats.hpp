#pragma once

#include <cstdint>
#include <vector>

#include "grouped_data.hpp"

namespace gco {

// Group-on-group linear fit. Data is centered before fitting; residuals are
// the original rows minus the fitted affine part, so residual row means
// are ~0:  Xi = coefficients * Xj + intercept + residuals.
struct RegressionFit {
  Matrix coefficients;  // n_i x n_j
  Vector intercept;     // n_i
  Matrix residuals;     // n_i x m
  double lambda = 0.0;  // 0 = OLS
};

// Cross-covariance of the rows of a (p x m) and b (q x m) with mean
// subtraction and divisor m-1. Requires m >= 2.
Matrix sample_cov(const Matrix& a, const Matrix& b);

// Self-covariance, symmetrized on output.
Matrix sample_cov(const Matrix& a);

// How regressions pick their ridge parameter. lambda > 0 selects the ridge
// estimate; cv selects a shrink level per regressor block by 10-fold cross
// validation over default_lambda_grid (seeded fold assignment) and scales
// it by the sample count to match the ridge formula's units.
struct RidgePolicy {
  double lambda = 0.0;
  bool cv = false;
  int folds = 10;
  std::uint64_t seed = 0;

  double effective_lambda(const Matrix& xj) const;
};

// OLS: C = cov(Xi,Xj) cov(Xj,Xj)^-1. Fails with a singular-regressors error
// (advising ridge) when cov(Xj,Xj) has condition number above 1e12.
RegressionFit ols_fit(const Matrix& xi, const Matrix& xj);

// Ridge: C = cov(Xi,Xj) * m * (m*cov(Xj,Xj) + lambda*I)^-1, always
// well-defined for lambda > 0. cov uses divisor m-1 throughout.
RegressionFit ridge_fit(const Matrix& xi, const Matrix& xj, double lambda);

RegressionFit fit_groups(const Matrix& xi, const Matrix& xj,
                         const RidgePolicy& policy);

// 10 log-spaced values in [1e-4*tr(cov)/n, tr(cov)/n]; scale-aware so the
// grid is invariant to global rescaling of the data.
std::vector<double> default_lambda_grid(const Matrix& xj);

// Picks the grid value maximizing the held-out Gaussian log-likelihood of
// the trace-preserving shrunk covariance
// (cov + lambda*I) / (1 + lambda*n/tr(cov)), fold-wise. Fold assignment is
// a seeded shuffle, so the result is deterministic given `seed`.
double cv_select_lambda(const Matrix& xj, const std::vector<double>& grid,
                        int folds, std::uint64_t seed);

// Mean 0, sample variance 1 (divisor m-1). Fails on (near-)constant input
// (sd <= 1e-12).
Vector standardize(const Vector& v);

double sample_variance(const Vector& v);

// Condition number of a symmetric PSD matrix (eigenvalue ratio).
double sym_condition_number(const Matrix& s);

inline constexpr double kSingularConditionLimit = 1e12;

}  // namespace gco
