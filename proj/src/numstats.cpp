#include "numstats.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rng.hpp"

namespace gco {

namespace {

Matrix centered_rows(const Matrix& a) {
  return a.colwise() - a.rowwise().mean();
}

void check_sample_counts(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorCode::invalid_argument,
          "sample counts differ: " + std::to_string(a.cols()) + " vs " +
              std::to_string(b.cols()));
  require(a.cols() >= 2, ErrorCode::sample_too_small,
          "need at least 2 samples for covariance, got " +
              std::to_string(a.cols()));
}

// Shared tail of ols/ridge: residuals on the original rows minus the fitted
// affine part.
RegressionFit assemble_fit(const Matrix& xi, const Matrix& xj, Matrix coeffs,
                           double lambda) {
  RegressionFit fit;
  fit.lambda = lambda;
  fit.coefficients = std::move(coeffs);
  const Vector mean_i = xi.rowwise().mean();
  const Vector mean_j = xj.rowwise().mean();
  fit.intercept = mean_i - fit.coefficients * mean_j;
  fit.residuals =
      (xi.colwise() - mean_i) - fit.coefficients * (xj.colwise() - mean_j);
  return fit;
}

}  // namespace

Matrix sample_cov(const Matrix& a, const Matrix& b) {
  check_sample_counts(a, b);
  const double denom = static_cast<double>(a.cols() - 1);
  return centered_rows(a) * centered_rows(b).transpose() / denom;
}

Matrix sample_cov(const Matrix& a) {
  Matrix s = sample_cov(a, a);
  return 0.5 * (s + s.transpose());
}

double sym_condition_number(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (hi <= 0.0) return std::numeric_limits<double>::infinity();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

RegressionFit ols_fit(const Matrix& xi, const Matrix& xj) {
  check_sample_counts(xi, xj);
  const Matrix cov_jj = sample_cov(xj);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_jj);
  const Vector& evals = eig.eigenvalues();
  const double hi = evals.maxCoeff();
  const double lo = evals.minCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > kSingularConditionLimit) {
    std::ostringstream msg;
    msg << "regressor covariance is singular (condition number ";
    if (lo <= 0.0)
      msg << "inf";
    else
      msg << hi / lo;
    msg << " exceeds 1e12); use ridge regression (lambda > 0)";
    fail(ErrorCode::singular_regressors, msg.str());
  }
  const Matrix cov_ij = sample_cov(xi, xj);
  const Matrix inv = eig.eigenvectors() *
                     evals.cwiseInverse().asDiagonal() *
                     eig.eigenvectors().transpose();
  return assemble_fit(xi, xj, cov_ij * inv, 0.0);
}

RegressionFit ridge_fit(const Matrix& xi, const Matrix& xj, double lambda) {
  check_sample_counts(xi, xj);
  require(lambda > 0.0, ErrorCode::invalid_argument,
          "ridge requires lambda > 0; use ols_fit for lambda = 0");
  const double m = static_cast<double>(xj.cols());
  const Matrix cov_jj = sample_cov(xj);
  const Matrix cov_ij = sample_cov(xi, xj);
  Matrix shrunk = m * cov_jj;
  shrunk.diagonal().array() += lambda;
  // (m cov + lambda I) is PD, LLT suffices.
  const Matrix coeffs =
      (m * cov_ij) * shrunk.llt().solve(Matrix::Identity(shrunk.rows(), shrunk.cols()));
  return assemble_fit(xi, xj, coeffs, lambda);
}

double RidgePolicy::effective_lambda(const Matrix& xj) const {
  if (cv) {
    // cv_select_lambda picks a covariance-shrink parameter; the ridge
    // formula weighs lambda against m*cov, so carry the intensity over by
    // scaling with the sample count.
    return static_cast<double>(xj.cols()) *
           cv_select_lambda(xj, default_lambda_grid(xj), folds, seed);
  }
  return lambda;
}

RegressionFit fit_groups(const Matrix& xi, const Matrix& xj,
                         const RidgePolicy& policy) {
  const double lambda = policy.effective_lambda(xj);
  if (lambda > 0.0) return ridge_fit(xi, xj, lambda);
  return ols_fit(xi, xj);
}

std::vector<double> default_lambda_grid(const Matrix& xj) {
  const Matrix cov = sample_cov(xj);
  const double scale =
      std::max(cov.trace() / static_cast<double>(cov.rows()), 1e-300);
  const double lo = 1e-4 * scale;
  const double hi = scale;
  std::vector<double> grid(10);
  for (int i = 0; i < 10; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / 9.0);
  }
  return grid;
}

double cv_select_lambda(const Matrix& xj, const std::vector<double>& grid,
                        int folds, std::uint64_t seed) {
  require(!grid.empty(), ErrorCode::invalid_argument, "empty lambda grid");
  for (double lambda : grid) {
    require(lambda > 0.0, ErrorCode::invalid_argument,
            "lambda grid values must be positive");
  }
  const int m = static_cast<int>(xj.cols());
  const int n = static_cast<int>(xj.rows());
  require(folds >= 2, ErrorCode::invalid_argument, "folds must be >= 2");
  require(m >= folds, ErrorCode::invalid_argument,
          "need at least `folds` samples");
  if (grid.size() == 1) return grid[0];

  std::vector<int> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed, {0xc5f01dULL}));
  rng.shuffle(idx);

  std::vector<double> total(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, val;
    for (int i = 0; i < m; ++i) {
      if (i % folds == f)
        val.push_back(idx[static_cast<std::size_t>(i)]);
      else
        train.push_back(idx[static_cast<std::size_t>(i)]);
    }
    Matrix tr(n, static_cast<int>(train.size()));
    for (std::size_t c = 0; c < train.size(); ++c)
      tr.col(static_cast<int>(c)) = xj.col(train[c]);
    const Vector mean = tr.rowwise().mean();
    const Matrix cov = sample_cov(tr);
    const double tau = std::max(cov.trace() / static_cast<double>(n), 1e-300);

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double lambda = grid[gi];
      // Trace-preserving shrink toward tau*I; lambda = tau is a 50/50 blend.
      Matrix shrunk = cov;
      shrunk.diagonal().array() += lambda;
      shrunk /= (1.0 + lambda / tau);
      Eigen::LLT<Matrix> llt(shrunk);
      if (llt.info() != Eigen::Success) {
        total[gi] = -std::numeric_limits<double>::infinity();
        continue;
      }
      double logdet = 0.0;
      for (int i = 0; i < n; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
      double ll = 0.0;
      for (int c : val) {
        const Vector x = xj.col(c) - mean;
        ll += -0.5 * (static_cast<double>(n) * std::log(2.0 * M_PI) + logdet +
                      x.dot(llt.solve(x)));
      }
      total[gi] += ll;
    }
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    if (total[gi] > total[best]) best = gi;
  }
  return grid[best];
}

double sample_variance(const Vector& v) {
  require(v.size() >= 2, ErrorCode::sample_too_small,
          "need at least 2 samples for variance");
  const double mean = v.mean();
  return (v.array() - mean).square().sum() /
         static_cast<double>(v.size() - 1);
}

Vector standardize(const Vector& v) {
  const double sd = std::sqrt(sample_variance(v));
  require(sd > 1e-12, ErrorCode::degenerate_variable,
          "variable is (near-)constant, cannot standardize");
  const double mean = v.mean();
  return (v.array() - mean) / sd;
}

}  // namespace gco
