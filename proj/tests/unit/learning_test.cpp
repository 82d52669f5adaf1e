#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dofid/drnn.hpp"
#include "dofid/learning.hpp"
#include "oracles.hpp"

namespace dofid {
namespace {

const DrnnParams kDefaults{};

Matrix uniform(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = u(rng);
  return M;
}

std::vector<RandomProjection> projections(std::uint64_t seed, const DrnnParams& p) {
  std::vector<RandomProjection> out;
  for (std::size_t h = 0; h + 1 < p.layers; ++h) out.push_back(RandomProjection::from_seed(seed + h, p.width));
  return out;
}

TEST(AdjTransform, ConstantMatrix) {
  const Matrix A = Matrix::Constant(3, 2, 4.2);
  const Matrix B = adj_transform(A);
  EXPECT_TRUE((B.array() == 0.001).all());
}

TEST(AdjTransform, TwoValues) {
  Matrix A(2, 1);
  A << 0, 1;
  const Matrix B = adj_transform(A);
  EXPECT_NEAR(B(0, 0), 0.001, 1e-15);
  EXPECT_NEAR(B(1, 0), 2.001, 1e-15);
}

TEST(AdjTransform, MinimumIsDelta) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Matrix A = uniform(rng, 1 + i % 9, 1 + i % 4) * 50.0 - Matrix::Constant(1 + i % 9, 1 + i % 4, 3.0);
    if (A.maxCoeff() == A.minCoeff()) continue;
    const Matrix B = adj_transform(A);
    EXPECT_NEAR(B.minCoeff(), 0.001, 1e-12);
    // affine in the input, so ranks are preserved
    for (Eigen::Index k = 1; k < A.size(); ++k)
      EXPECT_EQ(A.data()[k] < A.data()[0], B.data()[k] < B.data()[0]);
  }
}

TEST(FistaDesign, BiasColumnAndPositiveFeatures) {
  std::mt19937_64 rng(3);
  const Matrix T = uniform(rng, 12, 3);
  const auto proj = RandomProjection::from_seed(9, 3);
  const Matrix A = fista_design(T, proj, kDefaults);
  ASSERT_EQ(A.rows(), 12);
  ASSERT_EQ(A.cols(), 4);
  EXPECT_TRUE((A.col(3).array() == 1.0).all());
  EXPECT_NEAR(A.leftCols(3).minCoeff(), 0.001, 1e-12);
  const Matrix expected = adj_transform(psi(Matrix(T * proj.weights), kDefaults));
  EXPECT_EQ(A.leftCols(3), expected);
}

TEST(LassoObjective, HandComputed) {
  Matrix A(2, 1), W(1, 1), T(2, 1);
  A << 1, 2;
  W << 3;
  T << 1, 1;
  // residuals 2 and 5, squared sum 29, plus 0.5 * 3
  EXPECT_DOUBLE_EQ(lasso_objective(A, W, T, 0.5), 30.5);
}

TEST(FistaConfig, Validation) {
  EXPECT_NO_THROW(FistaConfig{}.validate());
  FistaConfig c;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.l1_coeff = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Fista, ZeroTargetGivesZero) {
  std::mt19937_64 rng(4);
  const auto r = fista_nonneg_lasso(uniform(rng, 8, 4), Matrix::Zero(8, 3), FistaConfig{});
  EXPECT_TRUE((r.W.array() == 0.0).all());
}

TEST(Fista, HugePenaltyGivesZero) {
  std::mt19937_64 rng(5);
  FistaConfig cfg;
  cfg.l1_coeff = 1e6;
  const auto r = fista_nonneg_lasso(uniform(rng, 8, 3), uniform(rng, 8, 3), cfg);
  EXPECT_TRUE((r.W.array() == 0.0).all());
}

TEST(Fista, MatchesProjectedGradientOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix A = uniform(rng, 8, 3);
    const Matrix T = uniform(rng, 8, 3);
    const auto r = fista_nonneg_lasso(A, T, FistaConfig{});
    const Matrix Wref = oracle::projected_gradient(A, T, 1.0, 100000);
    const double ref = lasso_objective(A, Wref, T, 1.0);
    EXPECT_LE(r.objective, ref * (1 + 1e-4)) << "trial " << trial;
    EXPECT_NEAR(r.objective, lasso_objective(A, r.W, T, 1.0), 1e-12 * (1 + r.objective));
  }
}

TEST(Fista, NeverWorseThanZeroAndNonNegative) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> l1(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index rows = 1 + trial % 16;
    const Matrix A = uniform(rng, rows, 1 + trial % 4) * 3.0;
    const Matrix T = uniform(rng, rows, 3) - Matrix::Constant(rows, 3, 0.3 * (trial % 2));
    FistaConfig cfg;
    cfg.l1_coeff = l1(rng);
    cfg.max_iters = 1 + trial % 50;
    const auto r = fista_nonneg_lasso(A, T, cfg);
    const double zero = lasso_objective(A, Matrix::Zero(A.cols(), 3), T, cfg.l1_coeff);
    EXPECT_LE(r.objective, zero);
    EXPECT_GE(r.W.minCoeff(), 0.0);
    EXPECT_LE(r.iterations, cfg.max_iters);
  }
}

TEST(FistaHiddenLayer, ShapeAndSign) {
  std::mt19937_64 rng(8);
  const Matrix T = uniform(rng, 20, 3);
  const Matrix W = fista_hidden_layer(T, RandomProjection::from_seed(3, 3), kDefaults, FistaConfig{});
  EXPECT_EQ(W.rows(), 4);
  EXPECT_EQ(W.cols(), 3);
  EXPECT_GE(W.minCoeff(), 0.0);
}

TEST(FistaHiddenLayer, EmptyTargetGivesZeroMatrix) {
  const Matrix W = fista_hidden_layer(Matrix(0, 3), RandomProjection::from_seed(3, 3), kDefaults, FistaConfig{});
  EXPECT_EQ(W.rows(), 4);
  EXPECT_EQ(W.cols(), 3);
  EXPECT_TRUE((W.array() == 0.0).all());
}

TEST(RandomProjection, ReproducibleUnitEntries) {
  const auto a = RandomProjection::from_seed(42, 3);
  const auto b = RandomProjection::from_seed(42, 3);
  const auto c = RandomProjection::from_seed(43, 3);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_NE(a.weights, c.weights);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_GE(a.weights.minCoeff(), 0.0);
  EXPECT_LE(a.weights.maxCoeff(), 1.0);
  EXPECT_EQ(a.weights.rows(), 3);
}

TEST(RescaleHidden, Examples) {
  const Matrix W = Matrix::Constant(4, 3, 2.0);
  Matrix out = Matrix::Constant(5, 3, 0.25);
  out(2, 1) = 0.5;
  EXPECT_TRUE(rescale_hidden(W, out).isApprox(W * 0.2, 1e-15));
  out(2, 1) = 0.1;
  EXPECT_TRUE(rescale_hidden(W, Matrix::Constant(5, 3, 0.1)).isApprox(W, 1e-15));
  Diagnostics d;
  EXPECT_EQ(rescale_hidden(W, Matrix::Zero(5, 3), &d), W);
  EXPECT_EQ(d.rescale_skipped, 1u);
}

TEST(PseudoInverse, PenroseConditionsOnRankDeficient) {
  std::mt19937_64 rng(9);
  const Matrix B = uniform(rng, 7, 2);
  Matrix A(7, 4);
  A << B, B.col(0) + B.col(1), 2.0 * B.col(1);
  const Matrix P = pseudo_inverse(A);
  EXPECT_LT((A * P * A - A).norm(), 1e-10);
  EXPECT_LT((P * A * P - P).norm(), 1e-10);
  EXPECT_LT(((A * P).transpose() - A * P).norm(), 1e-10);
  EXPECT_LT(((P * A).transpose() - P * A).norm(), 1e-10);
}

TEST(ElmOutputLayer, SquareSystemInterpolates) {
  std::mt19937_64 rng(10);
  const Matrix H = uniform(rng, 4, 3);
  const Matrix X = uniform(rng, 4, 3);
  const Matrix W = elm_output_layer(H, X);
  EXPECT_LT((with_bias(H) * W - X).norm(), 1e-9);
}

TEST(ElmOutputLayer, OverdeterminedMatchesNormalEquations) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix H = uniform(rng, 10, 3);
    const Matrix X = uniform(rng, 10, 3);
    const Matrix A = with_bias(H);
    const Matrix W = elm_output_layer(H, X);
    EXPECT_LT((W - oracle::normal_equations(A, X)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ElmOutputLayer, ZeroTargetsGiveZero) {
  std::mt19937_64 rng(12);
  EXPECT_TRUE((elm_output_layer(uniform(rng, 6, 3), Matrix::Zero(6, 3)).array() == 0.0).all());
}

TEST(ElmOutputLayer, ResidualIsMinimal) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix H = uniform(rng, 3 + trial % 12, 3);
    const Matrix X = uniform(rng, H.rows(), 3);
    const Matrix A = with_bias(H);
    const Matrix W = elm_output_layer(H, X);
    const double best = (A * W - X).norm();
    Matrix other = W;
    for (Eigen::Index i = 0; i < other.size(); ++i) other.data()[i] += n(rng);
    EXPECT_LE(best, (A * other - X).norm() + 1e-9);
  }
}

TEST(TukeyHinges, Examples) {
  const std::vector<double> eight{1, 2, 3, 4, 5, 6, 7, 8};
  const auto h = tukey_hinges(eight);
  EXPECT_DOUBLE_EQ(h.lower, 2.5);
  EXPECT_DOUBLE_EQ(h.upper, 6.5);
  const std::vector<double> five{5, 1, 4, 2, 3};
  const auto h5 = tukey_hinges(five);
  EXPECT_DOUBLE_EQ(h5.lower, 1.5);
  EXPECT_DOUBLE_EQ(h5.upper, 4.5);
  const std::vector<double> one{0.7};
  const auto h1 = tukey_hinges(one);
  EXPECT_EQ(h1.lower, 0.7);
  EXPECT_EQ(h1.upper, 0.7);
}

TEST(ComputeWhiskers, Examples) {
  Matrix Z(8, 3);
  for (int i = 0; i < 8; ++i) Z.row(i) << i + 1.0, 0.4, 8.0 - i;
  const auto w = compute_whiskers(Z);
  EXPECT_DOUBLE_EQ(w[0], 12.5);
  EXPECT_DOUBLE_EQ(w[1], 0.4);
  EXPECT_DOUBLE_EQ(w[2], 12.5);
  Matrix one(1, 3);
  one << 0.1, 0.2, 0.3;
  EXPECT_EQ(compute_whiskers(one), (Vec3{0.1, 0.2, 0.3}));
}

// Every multiset of size 1..12 over {0,...,4}, each presented in a shuffled order.
TEST(ComputeWhiskers, ExhaustiveSmallMultisets) {
  std::mt19937_64 rng(14);
  std::size_t checked = 0;
  for (int n = 1; n <= 12; ++n) {
    std::vector<int> counts(5, 0);
    counts[0] = n;
    while (true) {
      std::vector<double> values;
      for (int v = 0; v < 5; ++v) values.insert(values.end(), counts[v], static_cast<double>(v));
      std::shuffle(values.begin(), values.end(), rng);
      Matrix Z(n, 3);
      for (int i = 0; i < n; ++i) Z.row(i) << values[i], values[(i + 1) % n], 4.0 - values[i];
      std::vector<double> c1(n), c2(n);
      for (int i = 0; i < n; ++i) {
        c1[i] = values[(i + 1) % n];
        c2[i] = 4.0 - values[i];
      }
      const auto w = compute_whiskers(Z);
      ASSERT_EQ(w[0], oracle::whisker(values));
      ASSERT_EQ(w[1], oracle::whisker(c1));
      ASSERT_EQ(w[2], oracle::whisker(c2));
      const auto h = tukey_hinges(values);
      const auto [lo, hi] = oracle::hinges(values);
      ASSERT_EQ(h.lower, lo);
      ASSERT_EQ(h.upper, hi);
      ++checked;
      // next composition of n into 5 parts
      int k = 3;
      while (k >= 0 && counts[k] == 0) --k;
      if (k < 0) break;
      counts[k] -= 1;
      const int tail = counts[4] + 1;
      counts[4] = 0;
      counts[k + 1] = tail;
    }
  }
  EXPECT_EQ(checked, 6187u);
}

TEST(ComputeThreshold, Examples) {
  const std::vector<int> ones(7, 1);
  EXPECT_DOUBLE_EQ(compute_threshold(ones), 1.0);
  const std::vector<int> z{0, 0, 2, 2};
  EXPECT_DOUBLE_EQ(compute_threshold(z), 3.0);
  const std::vector<int> zero{0};
  EXPECT_DOUBLE_EQ(compute_threshold(zero), 0.0);
}

TEST(ComputeThreshold, SampleConvention) {
  const std::vector<int> z{0, 0, 2, 2};
  EXPECT_NEAR(compute_threshold(z, StdConvention::Sample), 1.0 + 2.0 * std::sqrt(4.0 / 3.0), 1e-15);
}

TEST(ComputeThreshold, RandomSequencesAgainstDefinition) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> v(0, 3), len(1, 300);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> z(static_cast<std::size_t>(len(rng)));
    for (auto& e : z) e = v(rng);
    const double n = static_cast<double>(z.size());
    double s = 0.0, ss = 0.0;
    for (int e : z) s += e;
    const double mean = s / n;
    for (int e : z) ss += (e - mean) * (e - mean);
    const double theta = compute_threshold(z);
    EXPECT_NEAR(theta, mean + 2.0 * std::sqrt(ss / n), 1e-12);
    EXPECT_GE(theta, mean - 1e-15);
  }
}

TEST(LocalLearn, EmptyTrainingSet) {
  Diagnostics d;
  TrainSet empty{Matrix(0, 3), {}};
  EXPECT_FALSE(local_learn(empty, kDefaults, LearnConfig{}, projections(1, kDefaults), &d).has_value());
  EXPECT_EQ(d.empty_benign_set, 1u);
}

TEST(LocalLearn, RequiresOneProjectionPerHiddenLayer) {
  std::mt19937_64 rng(16);
  TrainSet t{uniform(rng, 5, 3), {1, 2, 3, 4, 5}};
  EXPECT_THROW(local_learn(t, kDefaults, LearnConfig{}, projections(1, DrnnParams{.layers = 2}), nullptr),
               std::invalid_argument);
}

TEST(LocalLearn, SingleRowClassifiesItselfBenign) {
  Matrix X(1, 3);
  X << 0.4, 0.6, 0.2;
  const auto m = local_learn({X, {1}}, kDefaults, LearnConfig{}, projections(2, kDefaults));
  ASSERT_TRUE(m.has_value());
  const auto d = detect(Vec3{0.4, 0.6, 0.2}, *m, kDefaults);
  EXPECT_EQ(d.zeta, 0);
  EXPECT_EQ(d.y, 0);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(m->whiskers[i], std::abs(d.x_hat[i] - X(0, static_cast<Eigen::Index>(i))));
}

TEST(LocalLearn, ModelInvariants) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = uniform(rng, 5 + trial * 5, 3);
    std::vector<std::size_t> ids(static_cast<std::size_t>(X.rows()));
    std::iota(ids.begin(), ids.end(), 1);
    const auto m = local_learn({X, ids}, kDefaults, LearnConfig{}, projections(trial, kDefaults));
    ASSERT_TRUE(m.has_value());
    EXPECT_TRUE(m->shape_matches(kDefaults));
    for (const auto& W : m->hidden) EXPECT_GE(W.minCoeff(), 0.0);
    for (double w : m->whiskers) EXPECT_GE(w, 0.0);
    EXPECT_GE(m->theta, 0.0);
    // the decision rule is the one fitted on the model's own training residuals
    IdsModel refit = *m;
    fit_decision_rule(refit, X, kDefaults, StdConvention::Population);
    EXPECT_EQ(refit.whiskers, m->whiskers);
    EXPECT_EQ(refit.theta, m->theta);
  }
}

TEST(LocalLearn, Deterministic) {
  std::mt19937_64 rng(18);
  const Matrix X = uniform(rng, 40, 3);
  std::vector<std::size_t> ids(40);
  std::iota(ids.begin(), ids.end(), 1);
  const auto a = local_learn({X, ids}, kDefaults, LearnConfig{}, projections(5, kDefaults));
  const auto b = local_learn({X, ids}, kDefaults, LearnConfig{}, projections(5, kDefaults));
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
}

// Replicating every row k times scales the squared-error term by k, so the
// penalty is scaled alongside it; even |D| keeps the hinge halves replication
// invariant.
TEST(LocalLearn, ReplicatedTrainingSetGivesSameModel) {
  std::mt19937_64 rng(19);
  for (int k : {2, 3, 5}) {
    const Matrix X = uniform(rng, 12, 3);
    Matrix Xk(12 * k, 3);
    for (int r = 0; r < k; ++r) Xk.middleRows(12 * r, 12) = X;
    LearnConfig base;
    base.fista.max_iters = 5000;
    base.fista.tol = 1e-15;
    LearnConfig scaled = base;
    scaled.fista.l1_coeff = base.fista.l1_coeff * k;
    std::vector<std::size_t> ids(12), idsk(static_cast<std::size_t>(12 * k));
    std::iota(ids.begin(), ids.end(), 1);
    std::iota(idsk.begin(), idsk.end(), 1);
    const auto a = local_learn({X, ids}, kDefaults, base, projections(7, kDefaults));
    const auto b = local_learn({Xk, idsk}, kDefaults, scaled, projections(7, kDefaults));
    ASSERT_TRUE(a && b);
    for (std::size_t h = 0; h < a->hidden.size(); ++h)
      EXPECT_LT((a->hidden[h] - b->hidden[h]).cwiseAbs().maxCoeff(), 1e-8) << "k=" << k;
    const Vec3 probe{0.3, 0.5, 0.7};
    const auto xa = drnn_forward(probe, *a, kDefaults);
    const auto xb = drnn_forward(probe, *b, kDefaults);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(xa[i], xb[i], 1e-6) << "k=" << k;
      EXPECT_NEAR(a->whiskers[i], b->whiskers[i], 1e-6) << "k=" << k;
    }
    EXPECT_NEAR(a->theta, b->theta, 1e-12);
  }
}

TEST(HiddenActivations, MatchesLayerByLayerForward) {
  std::mt19937_64 rng(20);
  const auto m = oracle::random_model(rng, kDefaults);
  const Matrix X = uniform(rng, 6, 3);
  Matrix H = X;
  for (const auto& W : m.hidden) H = hidden_layer_forward(H, W, kDefaults);
  EXPECT_EQ(hidden_activations(X, m, kDefaults), H);
}

}  // namespace
}  // namespace dofid
