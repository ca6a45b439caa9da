#pragma once

#include <vector>

#include "independence.hpp"
#include "numstats.hpp"

namespace gco {

// GroupDirectLiNGAM score: for each candidate group j, regress every other
// group on j, test the residuals against Xj, and combine the p-values via
// Fisher's method, mu^(j) = -sum_{i != j} log p_ji. A residual block whose
// rows all have variance < 1e-12 is trivially independent and contributes
// p = 1.
ExogeneityScores score_gdl(const GroupedDataMatrix& data,
                           IndependenceMode mode,
                           const RidgePolicy& ridge = {});

// Scalar likelihood-ratio direction statistic: standardizes both inputs,
// then R = corr(x, y) * mean(x*g(y) - g(x)*y). Positive in the
// large-sample limit when x -> y. Antisymmetric to the last bit:
// pairwise_ratio(y, x) == -pairwise_ratio(x, y). The contrast g defaults
// to tanh (the scorers always use it); pass another one to override.
double pairwise_ratio(const Vector& x, const Vector& y,
                      double (*g)(double));
double pairwise_ratio(const Vector& x, const Vector& y);

// z_{k,l} = x_l^(i) - sum_{k' != k} b_{lk'} x_{k'}^(j), with b the OLS fit
// of variable l in group i on all of group j. Pairs (x_k^(j), z) meet the
// two-variable model assumption when group j is exogenous. k and l are
// 0-based within-group variable indices.
Vector leave_one_in_target(const GroupedDataMatrix& data, int j, int i,
                           int k, int l);

// Eq-style aggregation of the ratio values for one candidate:
// (1 / (n_j * sum_i n_i)) * sum min{0, R}^2.
double pairwise_aggregate(const std::vector<double>& ratios, int n_j,
                          int n_other_total);

// Pairwise Measure score. naive = true correlates raw variable pairs
// (inconsistent but sample-efficient); naive = false uses the
// leave-one-in-target construction.
ExogeneityScores score_pairwise(const GroupedDataMatrix& data, bool naive);

// Trace-method direction measure for X -> Y with B the (ridge/OLS)
// coefficients of Y on X and Sigma = cov(X, X):
// delta = log(tr(B S B')/n_y) - log(tr(S)/n_x) - log(tr(B B')/n_y).
double trace_delta(const Matrix& x, const Matrix& y,
                   const RidgePolicy& ridge = {});

// Same arithmetic on externally supplied matrices (n_y = B.rows(),
// n_x = B.cols()).
double trace_delta_from(const Matrix& b_hat, const Matrix& sigma);

// Trace-method score mu^(j) = sum_{i != j} (delta_{j->i} / delta_{i->j})^2
// with an epsilon guard: denominators below 1e-12 in magnitude are replaced
// by 1e-12 and the term is capped at 1e12.
ExogeneityScores score_trace(const GroupedDataMatrix& data,
                             const RidgePolicy& ridge = {});

ExogeneityScores score_with_method(const GroupedDataMatrix& data,
                                   Method method, const RidgePolicy& ridge);

}  // namespace gco
