#include "independence.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "numstats.hpp"
#include "rng.hpp"

namespace gco {

namespace {

constexpr int kHsicMinSamples = 20;
constexpr int kMedianHeuristicCap = 1000;

// Median of the positive pairwise column distances, on an evenly strided
// subsample of at most kMedianHeuristicCap columns (O(m^2) cost cap).
double median_bandwidth(const Matrix& x) {
  const int m = static_cast<int>(x.cols());
  const int take = std::min(m, kMedianHeuristicCap);
  std::vector<int> cols(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i) {
    cols[static_cast<std::size_t>(i)] =
        static_cast<int>(static_cast<std::int64_t>(i) * m / take);
  }
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(take) * (take - 1) / 2);
  for (int i = 0; i < take; ++i) {
    for (int j = i + 1; j < take; ++j) {
      const double d = (x.col(cols[static_cast<std::size_t>(i)]) -
                        x.col(cols[static_cast<std::size_t>(j)]))
                           .squaredNorm();
      if (d > 0.0) d2.push_back(d);
    }
  }
  require(!d2.empty(), ErrorCode::degenerate_variable,
          "input is constant, kernel bandwidth undefined");
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid),
                   d2.end());
  return std::sqrt(d2[mid]);
}

Matrix gaussian_gram(const Matrix& x, double sigma) {
  const Vector sq = x.colwise().squaredNorm().transpose();
  Matrix d2 = (-2.0 * x.transpose() * x);
  d2.rowwise() += sq.transpose();
  d2.colwise() += sq;
  return (-d2 / (2.0 * sigma * sigma)).array().exp();
}

void double_center_in_place(Matrix& k) {
  const Vector row_mean = k.rowwise().mean();
  const double grand = row_mean.mean();
  k.colwise() -= row_mean;
  k.rowwise() -= row_mean.transpose();
  k.array() += grand;
}

Matrix double_center(const Matrix& k) {
  Matrix c = k;
  double_center_in_place(c);
  return c;
}

// testStat = (1/m) sum(Kc .* Lc) = m * HSIC_b.
double hsic_statistic(const Matrix& kc, const Matrix& lc) {
  return kc.cwiseProduct(lc).sum() / static_cast<double>(kc.rows());
}

double offdiagonal_mean(const Matrix& k) {
  const double md = static_cast<double>(k.rows());
  return (k.sum() - k.diagonal().sum()) / (md * (md - 1.0));
}

void check_hsic_inputs(const Matrix& u, const Matrix& v) {
  require(u.cols() == v.cols(), ErrorCode::invalid_argument,
          "sample counts differ");
  require(u.cols() >= kHsicMinSamples, ErrorCode::sample_too_small,
          "HSIC gamma approximation needs m >= 20, got " +
              std::to_string(u.cols()));
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / M_SQRT2); }

double fisher_z_p(double corr, int m) {
  const double c = std::clamp(corr, -1.0 + 1e-15, 1.0 - 1e-15);
  const double z = std::atanh(c) * std::sqrt(static_cast<double>(m - 3));
  return normal_two_sided_p(z);
}

// Orthonormal basis (rows) of span{1, rows...} via modified Gram-Schmidt
// with one re-orthogonalization pass; near-dependent rows are dropped.
Matrix orthonormal_row_span(const Matrix& rows) {
  const int m = static_cast<int>(rows.cols());
  Matrix basis(rows.rows() + 1, m);
  basis.row(0).setOnes();
  if (rows.rows() > 0) basis.bottomRows(rows.rows()) = rows;
  Matrix q(basis.rows(), m);
  int r = 0;
  for (int i = 0; i < basis.rows(); ++i) {
    Vector w = basis.row(i).transpose();
    const double orig = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < r; ++j) {
        w -= q.row(j).dot(w) * q.row(j).transpose();
      }
    }
    const double norm = w.norm();
    if (norm > 1e-10 * std::max(orig, 1.0)) {
      q.row(r) = w.transpose() / norm;
      ++r;
    }
  }
  return q.topRows(r);
}

template <typename A, typename B>
double pearson(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const Eigen::ArrayXd ac = a.derived().reshaped().array() - a.mean();
  const Eigen::ArrayXd bc = b.derived().reshaped().array() - b.mean();
  const double na = std::sqrt(ac.square().sum());
  const double nb = std::sqrt(bc.square().sum());
  require(na > 0.0 && nb > 0.0, ErrorCode::degenerate_variable,
          "constant input in correlation");
  return (ac * bc).sum() / (na * nb);
}

}  // namespace

IndependenceResult hsic_test(const Matrix& u, const Matrix& v) {
  check_hsic_inputs(u, v);
  const int m = static_cast<int>(u.cols());
  const double md = static_cast<double>(m);

  // Two m x m matrices at peak, centered in place; the statistic and the
  // null moments accumulate in one fused pass.
  Matrix kc = gaussian_gram(u, median_bandwidth(u));
  const double mu_x = offdiagonal_mean(kc);
  double_center_in_place(kc);
  Matrix lc = gaussian_gram(v, median_bandwidth(v));
  const double mu_y = offdiagonal_mean(lc);
  double_center_in_place(lc);

  double stat_sum = 0.0;
  double b_all = 0.0;
  double b_diag = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double p = kc(i, j) * lc(i, j);
      stat_sum += p;
      const double b = (p / 6.0) * (p / 6.0);
      b_all += b;
      if (i == j) b_diag += b;
    }
  }
  const double stat = stat_sum / md;

  // Gamma null parameters, moment-matched (Gretton et al.).
  double var_hsic = (b_all - b_diag) / md / (md - 1.0);
  var_hsic *= 72.0 * (md - 4.0) * (md - 5.0) /
              (md * (md - 1.0) * (md - 2.0) * (md - 3.0));
  const double mean_hsic = (1.0 + mu_x * mu_y - mu_x - mu_y) / md;

  IndependenceResult result;
  result.kind = TestKind::hsic_gamma;
  result.statistic = stat;
  if (var_hsic <= 0.0 || mean_hsic <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double shape = mean_hsic * mean_hsic / var_hsic;
  const double scale = var_hsic * md / mean_hsic;
  result.p_value = boost::math::gamma_q(shape, std::max(stat, 0.0) / scale);
  return result;
}

IndependenceResult hsic_test_permutation(const Matrix& u, const Matrix& v,
                                         int permutations,
                                         std::uint64_t seed) {
  require(permutations >= 1, ErrorCode::invalid_argument,
          "need at least one permutation");
  check_hsic_inputs(u, v);
  const int m = static_cast<int>(u.cols());
  Matrix kc = gaussian_gram(u, median_bandwidth(u));
  double_center_in_place(kc);
  const Matrix l = gaussian_gram(v, median_bandwidth(v));
  const double stat = hsic_statistic(kc, double_center(l));

  Rng rng(derive_seed(seed, {0x9e26ULL}));
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  int exceed = 0;
  Matrix lp(m, m);
  for (int t = 0; t < permutations; ++t) {
    rng.shuffle(perm);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        lp(i, j) = l(perm[static_cast<std::size_t>(i)],
                     perm[static_cast<std::size_t>(j)]);
      }
    }
    if (hsic_statistic(kc, double_center(lp)) >= stat) ++exceed;
  }
  IndependenceResult result;
  result.kind = TestKind::hsic_gamma;
  result.statistic = stat;
  result.p_value = (1.0 + exceed) / (1.0 + permutations);
  return result;
}

IndependenceResult nlcorr_test(const Vector& u, const Vector& v,
                               Nonlinearity g) {
  require(u.size() == v.size(), ErrorCode::invalid_argument,
          "sample counts differ");
  const int m = static_cast<int>(u.size());
  require(m >= 5, ErrorCode::sample_too_small,
          "nlcorr needs m >= 5 for the Fisher-z approximation");
  const Vector us = standardize(u);
  const Vector vs = standardize(v);
  const double c1 = pearson(us.unaryExpr(g), vs);
  const double c2 = pearson(us, vs.unaryExpr(g));
  const double p1 = fisher_z_p(c1, m);
  const double p2 = fisher_z_p(c2, m);
  IndependenceResult result;
  result.kind = TestKind::nlcorr;
  result.statistic = std::max(std::abs(c1), std::abs(c2));
  result.p_value = std::min(1.0, 2.0 * std::min(p1, p2));
  return result;
}

IndependenceResult nlcorr_test(const Vector& u, const Vector& v) {
  return nlcorr_test(u, v, [](double t) { return std::tanh(t); });
}

double fisher_combine(const std::vector<double>& p_values) {
  require(!p_values.empty(), ErrorCode::invalid_argument,
          "no p-values to combine");
  double sum = 0.0;
  for (double p : p_values) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            ErrorCode::invalid_argument,
            "p-value outside [0, 1]: " + std::to_string(p));
    sum -= std::log(std::max(p, kPValueFloor));
  }
  return sum;
}

double group_independence(const Matrix& xj, const Matrix& rij,
                          IndependenceMode mode) {
  require(xj.cols() == rij.cols(), ErrorCode::invalid_argument,
          "sample counts differ");
  if (mode == IndependenceMode::hsic_gamma) {
    return hsic_test(xj, rij).p_value;
  }

  const int nj = static_cast<int>(xj.rows());
  const int ni = static_cast<int>(rij.rows());
  const int m = static_cast<int>(xj.cols());
  if (nj == 1 && ni == 1) {
    const Vector r = rij.row(0).transpose();
    if (sample_variance(r) < 1e-12) return 1.0;
    return nlcorr_test(xj.row(0).transpose(), r).p_value;
  }

  // Standardized rows and the orthogonalized tanh images. Correlating a
  // raw tanh row against an OLS residual is badly miscalibrated: the
  // residual is in-sample orthogonal to the regressor span, so only the
  // nonlinear remainder of tanh can correlate and the Fisher-z scale is
  // several times too wide (p-values pile up at 1 and entire scores tie at
  // zero). Removing the in-sample projection of tanh(row) onto the own
  // block's span restores the 1/sqrt(m) null scale.
  Matrix su(nj, m), tu(nj, m);
  for (int k = 0; k < nj; ++k) {
    su.row(k) = standardize(xj.row(k).transpose()).transpose();
    tu.row(k) = su.row(k).array().tanh();
  }
  std::vector<bool> degenerate(static_cast<std::size_t>(ni), false);
  Matrix sv(ni, m), tv(ni, m);
  for (int l = 0; l < ni; ++l) {
    const Vector row = rij.row(l).transpose();
    if (sample_variance(row) < 1e-12) {
      degenerate[static_cast<std::size_t>(l)] = true;
      sv.row(l).setZero();
      tv.row(l).setZero();
      continue;
    }
    sv.row(l) = standardize(row).transpose();
    tv.row(l) = sv.row(l).array().tanh();
  }
  const Matrix qu = orthonormal_row_span(su);
  tu -= (tu * qu.transpose()) * qu;
  Matrix sv_live(0, m);
  {
    std::vector<int> live;
    for (int l = 0; l < ni; ++l) {
      if (!degenerate[static_cast<std::size_t>(l)]) live.push_back(l);
    }
    sv_live.resize(static_cast<int>(live.size()), m);
    for (std::size_t i = 0; i < live.size(); ++i) {
      sv_live.row(static_cast<int>(i)) = sv.row(live[i]);
    }
  }
  const Matrix qv = orthonormal_row_span(sv_live);
  tv -= (tv * qv.transpose()) * qv;

  // Fisher's statistic over the per-direction p-values (continuous, unlike
  // the per-pair Bonferroni p, which has an atom at 1 under the null).
  double fisher_stat = 0.0;  // -2 sum log p
  int directions = 0;
  const double norm_floor = 1e-8 * std::sqrt(static_cast<double>(m));
  for (int k = 0; k < nj; ++k) {
    const double tu_norm = tu.row(k).norm();
    for (int l = 0; l < ni; ++l) {
      if (degenerate[static_cast<std::size_t>(l)]) continue;
      const double tv_norm = tv.row(l).norm();
      // Linear direction. For regression residuals this correlation is
      // zero by construction (the direction is skipped, keeping the pool
      // calibrated); for general inputs it carries the linear dependence.
      const double c_lin = su.row(k).dot(sv.row(l)) /
                           (su.row(k).norm() * sv.row(l).norm());
      if (std::abs(c_lin) > 1e-6) {
        fisher_stat +=
            -2.0 * std::log(std::max(fisher_z_p(c_lin, m), kPValueFloor));
        ++directions;
      }
      if (tu_norm > norm_floor) {
        const double c1 =
            tu.row(k).dot(sv.row(l)) / (tu_norm * sv.row(l).norm());
        fisher_stat +=
            -2.0 * std::log(std::max(fisher_z_p(c1, m), kPValueFloor));
        ++directions;
      }
      if (tv_norm > norm_floor) {
        const double c2 =
            su.row(k).dot(tv.row(l)) / (su.row(k).norm() * tv_norm);
        fisher_stat +=
            -2.0 * std::log(std::max(fisher_z_p(c2, m), kPValueFloor));
        ++directions;
      }
    }
  }
  if (directions == 0) return 1.0;
  // chi-square upper tail with 2 * directions degrees of freedom.
  return boost::math::gamma_q(static_cast<double>(directions),
                              fisher_stat / 2.0);
}

}  // namespace gco
