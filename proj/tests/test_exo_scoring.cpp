#include "exo_scoring.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "rng.hpp"
#include "synthgen.hpp"

namespace {

using gco::ExogeneityScores;
using gco::GenConfig;
using gco::GroupedDataMatrix;
using gco::GroupLayout;
using gco::IndependenceMode;
using gco::Matrix;
using gco::ModelSpec;
using gco::SampleResult;
using gco::Vector;

Vector laplace_vector(gco::Rng& rng, int m) {
  Vector v(m);
  for (int i = 0; i < m; ++i) {
    const double e = -std::log(rng.uniform01_open());
    v(i) = rng.uniform01() < 0.5 ? -e : e;
  }
  return v;
}

Matrix random_matrix(gco::Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

// Noise rows made exactly orthogonal in sample to the rows of `x` and to
// the constant vector.
Matrix projected_noise(gco::Rng& rng, const Matrix& x, int rows) {
  const int m = static_cast<int>(x.cols());
  Matrix basis(x.rows() + 1, m);
  basis.topRows(x.rows()) = x.colwise() - x.rowwise().mean();
  basis.row(x.rows()).setOnes();
  const Matrix gram = basis * basis.transpose();
  const Matrix projector =
      Matrix::Identity(m, m) - basis.transpose() * gram.inverse() * basis;
  return random_matrix(rng, rows, m) * projector;
}

TEST(PairwiseRatio, SameDataGivesExactZero) {
  gco::Rng rng(201);
  const Vector x = laplace_vector(rng, 300);
  EXPECT_EQ(gco::pairwise_ratio(x, x), 0.0);
}

TEST(PairwiseRatio, AntisymmetricToTheLastBit) {
  gco::Rng rng(203);
  for (int t = 0; t < 50; ++t) {
    const Vector x = laplace_vector(rng, 200);
    Vector y = 0.7 * x + laplace_vector(rng, 200);
    const double fwd = gco::pairwise_ratio(x, y);
    const double bwd = gco::pairwise_ratio(y, x);
    EXPECT_EQ(bwd, -fwd);
  }
}

TEST(PairwiseRatio, PositiveForTrueDirection) {
  // y = 0.8 x + 0.6 e with Laplace x, e; the full 100-trial version runs in
  // the acceptance suite.
  int positive = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    gco::Rng rng(300 + t);
    const Vector x = laplace_vector(rng, 5000);
    const Vector y = 0.8 * x + 0.6 * laplace_vector(rng, 5000);
    if (gco::pairwise_ratio(x, y) > 0.0) ++positive;
  }
  EXPECT_GE(positive, static_cast<int>(0.95 * trials));
}

TEST(PairwiseRatio, DegenerateInputErrors) {
  const Vector c = Vector::Ones(50);
  const Vector v = Vector::Random(50);
  EXPECT_THROW(gco::pairwise_ratio(c, v), gco::Error);
}

TEST(LeaveOneInTarget, SingleRegressorLeavesTargetUntouched) {
  gco::Rng rng(205);
  Matrix values = random_matrix(rng, 3, 50);
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({1, 2}));
  const Vector z = gco::leave_one_in_target(data, 1, 2, 0, 1);
  EXPECT_EQ(z, Vector(values.row(2).transpose()));
}

TEST(LeaveOneInTarget, NoiseFreeRecovery) {
  gco::Rng rng(207);
  const Matrix xj = random_matrix(rng, 3, 100);
  Matrix b(1, 3);
  b << 0.9, -0.6, 0.3;
  Matrix values(4, 100);
  values.topRows(3) = xj;
  values.row(3) = b * xj;
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({3, 1}));
  for (int k = 0; k < 3; ++k) {
    const Vector z = gco::leave_one_in_target(data, 1, 2, k, 0);
    const Vector want = b(0, k) * xj.row(k).transpose();
    EXPECT_LT((z - want).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(LeaveOneInTarget, ReconstructsTargetVariable) {
  gco::Rng rng(209);
  Matrix values = random_matrix(rng, 5, 80);
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({3, 2}));
  const Matrix xj = data.group(1);
  const gco::RegressionFit fit = gco::ols_fit(data.group(2), xj);
  const int k = 1, l = 0;
  const Vector z = gco::leave_one_in_target(data, 1, 2, k, l);
  Vector sum = Vector::Zero(80);
  for (int kk = 0; kk < 3; ++kk) {
    if (kk != k) sum += fit.coefficients(l, kk) * xj.row(kk).transpose();
  }
  const Vector target = data.group(2).row(l).transpose();
  EXPECT_LT((z + sum - target).cwiseAbs().maxCoeff(),
            1e-10 * target.cwiseAbs().maxCoeff());
}

TEST(PairwiseAggregate, HandValues) {
  EXPECT_EQ(gco::pairwise_aggregate({0.3, 0.001, 2.0}, 2, 3), 0.0);
  EXPECT_NEAR(gco::pairwise_aggregate({-0.2}, 1, 1), 0.04, 1e-10);
  EXPECT_NEAR(gco::pairwise_aggregate({-0.2, 0.5, -0.1}, 2, 3),
              (0.04 + 0.01) / 6.0, 1e-12);
}

TEST(ScorePairwise, RecoversExogenousGroupOnGeneratedModels) {
  // Fig. 1(a) small family: 5 groups of 6, s = 10%, m = 1000. Super-Gaussian
  // sources: the tanh contrast has no power on near-Gaussian mixtures.
  GenConfig cfg;
  cfg.group_sizes = {6, 6, 6, 6, 6};
  cfg.sparsity = 0.10;
  cfg.q_ranges = {{1.2, 2.0}};
  int correct = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = 400 + t;
    const ModelSpec spec = gco::generate_model(cfg);
    const SampleResult sample = gco::sample_data(spec, 1000, 17 + t);
    const ExogeneityScores scores = gco::score_pairwise(sample.data, false);
    if (scores.chosen == sample.truth.order.front()) ++correct;
  }
  EXPECT_GE(correct, static_cast<int>(0.8 * trials));
}

TEST(ScorePairwise, ZeroScoreIffNoNegativeRatios) {
  gco::Rng rng(211);
  // Noise-free chain: group 1 drives group 2, all ratios positive for the
  // true candidate.
  const Vector x = laplace_vector(rng, 2000);
  Matrix values(2, 2000);
  values.row(0) = x;
  values.row(1) = 0.8 * x.transpose() +
                  0.6 * laplace_vector(rng, 2000).transpose();
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({1, 1}));
  const ExogeneityScores scores = gco::score_pairwise(data, false);
  EXPECT_EQ(scores.chosen, 1);
  EXPECT_EQ(scores.scores.at(1), 0.0);
  EXPECT_GT(scores.scores.at(2), 0.0);
}

TEST(ScorePairwise, InvariantToWithinGroupPermutation) {
  GenConfig cfg;
  cfg.group_sizes = {3, 3};
  cfg.sparsity = 1.0;
  cfg.seed = 77;
  const ModelSpec spec = gco::generate_model(cfg);
  const SampleResult sample = gco::sample_data(spec, 400, 5);
  const ExogeneityScores base = gco::score_pairwise(sample.data, false);

  // Reverse the rows inside each group.
  Matrix shuffled = sample.data.values();
  int off = 0;
  for (int size : sample.data.layout().sizes) {
    shuffled.middleRows(off, size) =
        shuffled.middleRows(off, size).colwise().reverse().eval();
    off += size;
  }
  const GroupedDataMatrix permuted(shuffled, sample.data.layout());
  const ExogeneityScores moved = gco::score_pairwise(permuted, false);
  for (const auto& [id, mu] : base.scores) {
    EXPECT_NEAR(moved.scores.at(id), mu, 1e-12 * std::max(1.0, mu));
  }
  EXPECT_EQ(moved.chosen, base.chosen);
}

TEST(ScoreGdl, NoiseFreeEffectIsDegenerateAndExogenousWins) {
  gco::Rng rng(213);
  const Matrix xj = random_matrix(rng, 2, 200);
  Matrix b(2, 2);
  b << 1.0, 0.5, -0.7, 0.4;
  Matrix values(4, 200);
  values.topRows(2) = xj;
  values.bottomRows(2) = b * xj;  // exact, residuals vanish
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({2, 2}));
  const ExogeneityScores scores =
      gco::score_gdl(data, IndependenceMode::nlcorr);
  EXPECT_EQ(scores.chosen, 1);
  // Regressing group 1 on group 2 also has vanishing residuals here, so
  // both candidates hit the degenerate-residual rule; the score of the true
  // group must not exceed the alternative.
  EXPECT_LE(scores.scores.at(1), scores.scores.at(2));
}

TEST(ScoreGdl, RecoversExogenousGroupStrongEffects) {
  GenConfig cfg;
  cfg.group_sizes = {4, 4, 4};
  cfg.sparsity = 0.3;
  int correct = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = 500 + t;
    const ModelSpec spec = gco::generate_model(cfg);
    const SampleResult sample = gco::sample_data(spec, 5000, 23 + t);
    const ExogeneityScores scores =
        gco::score_gdl(sample.data, IndependenceMode::nlcorr);
    if (scores.chosen == sample.truth.order.front()) ++correct;
  }
  EXPECT_GE(correct, static_cast<int>(0.9 * trials));
}

TEST(ScoreGdl, HsicModeRecoversExogenousGroup) {
  GenConfig cfg;
  cfg.group_sizes = {2, 2};
  cfg.sparsity = 1.0;
  cfg.q_ranges = {{1.2, 2.0}};
  int correct = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = 600 + t;
    const ModelSpec spec = gco::generate_model(cfg);
    const SampleResult sample = gco::sample_data(spec, 300, 19 + t);
    const ExogeneityScores scores =
        gco::score_gdl(sample.data, IndependenceMode::hsic_gamma);
    if (scores.chosen == sample.truth.order.front()) ++correct;
  }
  EXPECT_GE(correct, static_cast<int>(0.8 * trials));
}

TEST(ScoreGdl, SymmetricNullChoosesEitherGroupEvenly) {
  int chose_first = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    gco::Rng rng(700 + t);
    Matrix values = random_matrix(rng, 4, 500);
    const GroupedDataMatrix data(values, GroupLayout::of_sizes({2, 2}));
    const ExogeneityScores scores =
        gco::score_gdl(data, IndependenceMode::nlcorr);
    if (scores.chosen == 1) ++chose_first;
  }
  EXPECT_GE(chose_first, static_cast<int>(0.4 * trials));
  EXPECT_LE(chose_first, static_cast<int>(0.6 * trials));
}

TEST(TraceDelta, WhitenedRegressorsGiveZero) {
  gco::Rng rng(215);
  Matrix x = random_matrix(rng, 3, 400);
  // In-sample whitening.
  const Matrix cov = gco::sample_cov(x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Matrix white =
      eig.operatorInverseSqrt() * (x.colwise() - x.rowwise().mean());
  const Matrix y = random_matrix(rng, 2, 400) +
                   random_matrix(rng, 2, 3) * white;
  EXPECT_NEAR(gco::trace_delta(white, y), 0.0, 1e-10);
}

TEST(TraceDelta, InvariantUnderRotationOfWhitenedRegressors) {
  gco::Rng rng(223);
  Matrix x = random_matrix(rng, 3, 400);
  const Matrix cov = gco::sample_cov(x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Matrix white =
      eig.operatorInverseSqrt() * (x.colwise() - x.rowwise().mean());
  const Matrix y = random_matrix(rng, 2, 400) +
                   random_matrix(rng, 2, 3) * white;
  // Orthogonal rotation applied in sample keeps the whitened covariance
  // at the identity, so delta stays 0.
  Matrix a = random_matrix(rng, 3, 3);
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix rot = qr.householderQ();
  EXPECT_NEAR(gco::trace_delta(rot * white, y), 0.0, 1e-8);
}

TEST(TraceDeltaFrom, InjectedHandValue) {
  Matrix b(2, 2);
  b << 1, 1, 0, 1;
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = 1.0;
  sigma(1, 1) = 2.0;
  const double want = std::log(2.5) - std::log(1.5) - std::log(1.5);
  EXPECT_NEAR(gco::trace_delta_from(b, sigma), want, 1e-10);
  EXPECT_NEAR(gco::trace_delta_from(b, sigma), 0.1054, 5e-5);
}

TEST(TraceDeltaFrom, OrthogonalConnectionGivesZero) {
  const double theta = 0.7;
  Matrix rot(2, 2);
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  gco::Rng rng(217);
  const Matrix a = random_matrix(rng, 2, 2);
  const Matrix sigma = a * a.transpose();
  EXPECT_NEAR(gco::trace_delta_from(rot, sigma), 0.0, 1e-10);
}

TEST(TraceDelta, ExactZeroConnectionRaisesNoEffect) {
  gco::Rng rng(219);
  const Matrix x = random_matrix(rng, 2, 100);
  const Matrix y = projected_noise(rng, x, 2);
  try {
    gco::trace_delta(x, y);
    FAIL() << "expected no-effect";
  } catch (const gco::Error& e) {
    EXPECT_EQ(e.code(), gco::ErrorCode::no_effect);
  }
}

TEST(ScoreTrace, TwoGroupsPickSmallerForwardDelta) {
  GenConfig cfg;
  cfg.group_sizes = {3, 3};
  cfg.sparsity = 1.0;
  cfg.seed = 97;
  const ModelSpec spec = gco::generate_model(cfg);
  const SampleResult sample = gco::sample_data(spec, 2000, 3);
  const Matrix x1 = sample.data.group(1);
  const Matrix x2 = sample.data.group(2);
  const double d12 = gco::trace_delta(x1, x2);
  const double d21 = gco::trace_delta(x2, x1);
  const ExogeneityScores scores = gco::score_trace(sample.data);
  EXPECT_EQ(scores.chosen, std::abs(d12) < std::abs(d21) ? 1 : 2);
}

TEST(ScoreTrace, BetterThanChanceOnWideGroups) {
  // Random mixers leave the within-group covariance ill-conditioned
  // (condition of M squared), which blows up the backward-coefficient
  // traces under plain OLS. A small ridge (1% of the sample count with
  // unit-variance noise) suppresses those directions.
  GenConfig cfg;
  cfg.group_sizes = {12, 12, 12, 12, 12};
  cfg.sparsity = 0.10;
  const int m = 1000;
  gco::RidgePolicy ridge;
  ridge.lambda = 0.01 * m;
  int correct = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    cfg.seed = 900 + t;
    const ModelSpec spec = gco::generate_model(cfg);
    const SampleResult sample = gco::sample_data(spec, m, 29 + t);
    const ExogeneityScores scores = gco::score_trace(sample.data, ridge);
    if (scores.chosen == sample.truth.order.front()) ++correct;
  }
  EXPECT_GE(correct, static_cast<int>(0.4 * trials));  // chance is 20%
}

TEST(ScoreTrace, SymmetricNullRaisesNoEffectDiagnostic) {
  gco::Rng rng(221);
  Matrix values(4, 150);
  const Matrix x = random_matrix(rng, 2, 150);
  values.topRows(2) = x;
  values.bottomRows(2) = projected_noise(rng, x, 2);
  const GroupedDataMatrix data(values, GroupLayout::of_sizes({2, 2}));
  try {
    gco::score_trace(data);
    FAIL() << "expected no-effect";
  } catch (const gco::Error& e) {
    EXPECT_EQ(e.code(), gco::ErrorCode::no_effect);
    EXPECT_NE(std::string(e.what()).find("pair"), std::string::npos);
  }
}

TEST(Scorers, ChoiceEquivariantUnderBlockPermutation) {
  GenConfig cfg;
  cfg.group_sizes = {3, 3, 3};
  cfg.sparsity = 0.8;
  cfg.seed = 119;
  const ModelSpec spec = gco::generate_model(cfg);
  const SampleResult sample = gco::sample_data(spec, 1500, 31);
  const std::vector<int> perm{3, 1, 2};
  const GroupedDataMatrix moved = gco::block_permute(sample.data, perm);

  auto run = [&](const GroupedDataMatrix& d, gco::Method method) {
    return gco::score_with_method(d, method, {});
  };
  for (gco::Method method : {gco::Method::gdl_nlcorr, gco::Method::pairwise,
                             gco::Method::trace}) {
    const ExogeneityScores base = run(sample.data, method);
    const ExogeneityScores after = run(moved, method);
    // New block t holds old group perm[t-1].
    EXPECT_EQ(perm[static_cast<std::size_t>(after.chosen - 1)], base.chosen);
    for (int t = 1; t <= 3; ++t) {
      const double want = base.scores.at(perm[static_cast<std::size_t>(t - 1)]);
      EXPECT_NEAR(after.scores.at(t), want, 1e-9 * std::max(1.0, want));
    }
  }
}

TEST(Scorers, ScoresAreNonnegative) {
  GenConfig cfg;
  cfg.group_sizes = {2, 2, 2};
  cfg.sparsity = 0.6;
  for (int t = 0; t < 5; ++t) {
    cfg.seed = 1300 + t;
    const SampleResult sample =
        gco::sample_data(gco::generate_model(cfg), 300, 7 + t);
    for (gco::Method method : {gco::Method::gdl_nlcorr, gco::Method::pairwise,
                               gco::Method::naive_pairwise,
                               gco::Method::trace}) {
      const ExogeneityScores scores =
          gco::score_with_method(sample.data, method, {});
      for (const auto& [id, mu] : scores.scores) {
        EXPECT_GE(mu, 0.0);
        EXPECT_TRUE(std::isfinite(mu));
      }
    }
  }
}

}  // namespace
