#include "exo_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gco {

namespace {

constexpr double kResidualVarianceFloor = 1e-12;
constexpr double kTraceDenomEps = 1e-12;
constexpr double kTraceTermCap = 1e12;

double max_row_variance(const Matrix& rows) {
  double best = 0.0;
  for (int r = 0; r < rows.rows(); ++r) {
    best = std::max(best, sample_variance(rows.row(r).transpose()));
  }
  return best;
}

void check_multi_group(const GroupedDataMatrix& data) {
  require(data.group_count() >= 2, ErrorCode::invalid_argument,
          "need at least 2 groups, got " +
              std::to_string(data.group_count()));
}

}  // namespace

ExogeneityScores score_gdl(const GroupedDataMatrix& data,
                           IndependenceMode mode, const RidgePolicy& ridge) {
  check_multi_group(data);
  ExogeneityScores out;
  out.method = mode == IndependenceMode::hsic_gamma ? Method::gdl_hsic
                                                    : Method::gdl_nlcorr;
  for (int j : data.layout().ids) {
    const Matrix xj = data.group(j);
    RidgePolicy local = ridge;
    local.lambda = ridge.effective_lambda(xj);
    local.cv = false;
    double mu = 0.0;
    for (int i : data.layout().ids) {
      if (i == j) continue;
      const RegressionFit fit = fit_groups(data.group(i), xj, local);
      double p = 1.0;
      if (max_row_variance(fit.residuals) >= kResidualVarianceFloor) {
        p = group_independence(xj, fit.residuals, mode);
      }
      mu -= std::log(std::max(p, kPValueFloor));
    }
    out.scores[j] = mu;
  }
  finalize_scores(out);
  return out;
}

double pairwise_ratio(const Vector& x, const Vector& y, double (*g)(double)) {
  const Vector xs = standardize(x);
  const Vector ys = standardize(y);
  const double m = static_cast<double>(xs.size());
  const double rho = xs.dot(ys) / (m - 1.0);
  // Per-sample x*g(y) - g(x)*y; every operation is sign-symmetric, so
  // swapping the arguments flips the sign exactly.
  double acc = 0.0;
  for (int s = 0; s < xs.size(); ++s) {
    acc += xs[s] * g(ys[s]) - g(xs[s]) * ys[s];
  }
  return rho * (acc / m);
}

double pairwise_ratio(const Vector& x, const Vector& y) {
  return pairwise_ratio(x, y, [](double t) { return std::tanh(t); });
}

Vector leave_one_in_target(const GroupedDataMatrix& data, int j, int i,
                           int k, int l) {
  require(i != j, ErrorCode::invalid_argument,
          "candidate and target group must differ");
  const Matrix xj = data.group(j);
  const Matrix xi = data.group(i);
  const int nj = static_cast<int>(xj.rows());
  require(k >= 0 && k < nj, ErrorCode::invalid_argument,
          "variable index k out of range");
  require(l >= 0 && l < xi.rows(), ErrorCode::invalid_argument,
          "variable index l out of range");
  const RegressionFit fit = ols_fit(xi.row(l), xj);
  Vector z = xi.row(l).transpose();
  for (int kk = 0; kk < nj; ++kk) {
    if (kk == k) continue;
    z -= fit.coefficients(0, kk) * xj.row(kk).transpose();
  }
  return z;
}

double pairwise_aggregate(const std::vector<double>& ratios, int n_j,
                          int n_other_total) {
  require(n_j >= 1 && n_other_total >= 1, ErrorCode::invalid_argument,
          "group sizes must be positive");
  double sum = 0.0;
  for (double r : ratios) {
    const double neg = std::min(0.0, r);
    sum += neg * neg;
  }
  return sum / (static_cast<double>(n_j) * static_cast<double>(n_other_total));
}

ExogeneityScores score_pairwise(const GroupedDataMatrix& data, bool naive) {
  check_multi_group(data);
  ExogeneityScores out;
  out.method = naive ? Method::naive_pairwise : Method::pairwise;
  for (int j : data.layout().ids) {
    const Matrix xj = data.group(j);
    const int nj = static_cast<int>(xj.rows());
    std::vector<double> ratios;
    int n_other = 0;
    for (int i : data.layout().ids) {
      if (i == j) continue;
      const Matrix xi = data.group(i);
      const int ni = static_cast<int>(xi.rows());
      n_other += ni;
      Matrix coeffs;
      if (!naive) coeffs = ols_fit(xi, xj).coefficients;
      for (int k = 0; k < nj; ++k) {
        const Vector xk = xj.row(k).transpose();
        for (int l = 0; l < ni; ++l) {
          if (naive) {
            ratios.push_back(pairwise_ratio(xk, xi.row(l).transpose()));
            continue;
          }
          Vector z = xi.row(l).transpose();
          for (int kk = 0; kk < nj; ++kk) {
            if (kk == k) continue;
            z -= coeffs(l, kk) * xj.row(kk).transpose();
          }
          ratios.push_back(pairwise_ratio(xk, z));
        }
      }
    }
    out.scores[j] = pairwise_aggregate(ratios, nj, n_other);
  }
  finalize_scores(out);
  return out;
}

double trace_delta_from(const Matrix& b_hat, const Matrix& sigma) {
  require(sigma.rows() == sigma.cols() && sigma.rows() == b_hat.cols(),
          ErrorCode::invalid_argument, "dimension mismatch");
  const double ny = static_cast<double>(b_hat.rows());
  const double nx = static_cast<double>(b_hat.cols());
  const double tr_b = b_hat.squaredNorm();  // tr(B B')
  require(tr_b >= 1e-20, ErrorCode::no_effect,
          "estimated connection matrix is numerically zero");
  const double tr_s = sigma.trace();
  const double tr_bsb = (b_hat * sigma).cwiseProduct(b_hat).sum();
  require(tr_s > 0.0 && tr_bsb > 0.0, ErrorCode::degenerate_variable,
          "nonpositive trace in delta computation");
  return std::log(tr_bsb / ny) - std::log(tr_s / nx) - std::log(tr_b / ny);
}

double trace_delta(const Matrix& x, const Matrix& y,
                   const RidgePolicy& ridge) {
  const RegressionFit fit = fit_groups(y, x, ridge);
  return trace_delta_from(fit.coefficients, sample_cov(x));
}

ExogeneityScores score_trace(const GroupedDataMatrix& data,
                             const RidgePolicy& ridge) {
  check_multi_group(data);
  const auto& ids = data.layout().ids;
  const int num_groups = data.group_count();

  // delta[a][b] = delta_{ids[a] -> ids[b]}
  std::vector<std::vector<double>> delta(
      static_cast<std::size_t>(num_groups),
      std::vector<double>(static_cast<std::size_t>(num_groups), 0.0));
  for (int a = 0; a < num_groups; ++a) {
    for (int b = 0; b < num_groups; ++b) {
      if (a == b) continue;
      try {
        delta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            trace_delta(data.group(ids[static_cast<std::size_t>(a)]),
                        data.group(ids[static_cast<std::size_t>(b)]), ridge);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_effect) throw;
        std::ostringstream msg;
        msg << "no effect detected for group pair "
            << ids[static_cast<std::size_t>(a)] << " -> "
            << ids[static_cast<std::size_t>(b)] << ": " << e.what();
        fail(ErrorCode::no_effect, msg.str());
      }
    }
  }

  ExogeneityScores out;
  out.method = Method::trace;
  for (int a = 0; a < num_groups; ++a) {
    double mu = 0.0;
    for (int b = 0; b < num_groups; ++b) {
      if (a == b) continue;
      const double forward =
          delta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      const double backward =
          delta[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
      if (std::abs(backward) < kTraceDenomEps) {
        const double ratio = forward / kTraceDenomEps;
        mu += std::min(ratio * ratio, kTraceTermCap);
      } else {
        const double ratio = forward / backward;
        mu += ratio * ratio;
      }
    }
    out.scores[ids[static_cast<std::size_t>(a)]] = mu;
  }
  finalize_scores(out);
  return out;
}

ExogeneityScores score_with_method(const GroupedDataMatrix& data,
                                   Method method, const RidgePolicy& ridge) {
  switch (method) {
    case Method::gdl_hsic:
      return score_gdl(data, IndependenceMode::hsic_gamma, ridge);
    case Method::gdl_nlcorr:
      return score_gdl(data, IndependenceMode::nlcorr, ridge);
    case Method::pairwise:
      return score_pairwise(data, false);
    case Method::naive_pairwise:
      return score_pairwise(data, true);
    case Method::trace:
      return score_trace(data, ridge);
  }
  fail(ErrorCode::internal, "unknown method");
}

}  // namespace gco
