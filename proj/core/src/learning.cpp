#include "dofid/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dofid {

void FistaConfig::validate() const {
  if (!(l1_coeff >= 0.0)) throw ConfigError("fista.l1_coeff must be non-negative");
  if (max_iters < 1) throw ConfigError("fista.max_iters must be at least 1");
  if (!(tol > 0.0)) throw ConfigError("fista.tol must be positive");
  if (power_iters < 1) throw ConfigError("fista.power_iters must be at least 1");
}

RandomProjection RandomProjection::from_seed(std::uint64_t seed, std::size_t width) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(width);
  RandomProjection proj{Matrix(d, d), seed};
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) proj.weights(i, j) = unif(rng);
  }
  return proj;
}

Matrix adj_transform(const Matrix& A) {
  if (A.size() == 0) return A;
  constexpr double kOffset = 0.001;
  const double lo = A.minCoeff();
  const double hi = A.maxCoeff();
  Matrix out = A;
  if (hi > lo) {
    out = (A.array() - lo) / (hi - lo);
  } else {
    out.setZero();
  }
  const double n = static_cast<double>(out.size());
  const double mean = out.sum() / n;
  const double var = (out.array() - mean).square().sum() / n;
  if (var > 0.0) {
    out = (out.array() - mean) / std::sqrt(var);
  } else {
    out.setZero();
  }
  return out.array() - out.minCoeff() + kOffset;
}

Matrix fista_design(const Matrix& target, const RandomProjection& proj, const DrnnParams& params,
                    Diagnostics* diag) {
  return with_bias(adj_transform(psi(target * proj.weights, params, diag)));
}

double lasso_objective(const Matrix& A, const Matrix& W, const Matrix& T, double l1) {
  return (A * W - T).squaredNorm() + l1 * W.cwiseAbs().sum();
}

namespace {

double largest_eigenvalue(const Matrix& G, int iters) {
  Vector v = Vector::Ones(G.rows());
  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = G * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    estimate = v.dot(G * v);
  }
  return estimate;
}

}  // namespace

FistaResult fista_nonneg_lasso(const Matrix& A, const Matrix& T, const FistaConfig& cfg) {
  cfg.validate();
  FistaResult res;
  res.W = Matrix::Zero(A.cols(), T.cols());
  const double c = T.squaredNorm();
  res.objective = c;
  if (A.rows() == 0) return res;

  // With Gram matrix G = A^T A the smooth part is tr(W^T G W) - 2 tr(W^T B) + c,
  // so each iteration costs O(cols^2) regardless of the sample count.
  const Matrix G = A.transpose() * A;
  const Matrix B = A.transpose() * T;
  const double lipschitz = 2.0 * largest_eigenvalue(G, cfg.power_iters);
  if (!(lipschitz > 0.0)) return res;
  const double step = 1.0 / lipschitz;
  const double shrink = step * cfg.l1_coeff;

  auto objective = [&](const Matrix& W) {
    return (W.array() * (G * W).array()).sum() - 2.0 * (W.array() * B.array()).sum() + c +
           cfg.l1_coeff * W.sum();  // W >= 0, so ||W||_1 = sum(W)
  };

  Matrix W = res.W;
  Matrix Y = W;
  double t = 1.0;
  double prev = c;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    const Matrix grad = 2.0 * (G * Y - B);
    // soft-threshold then project onto W >= 0
    Matrix W_next = ((Y - step * grad).array() - shrink).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Y = W_next + ((t - 1.0) / t_next) * (W_next - W);
    W = std::move(W_next);
    t = t_next;

    const double f = objective(W);
    res.iterations = k;
    if (f < res.objective) {
      res.objective = f;
      res.W = W;
    }
    if (std::abs(prev - f) <= cfg.tol * std::max(std::abs(prev), 1e-300)) break;
    prev = f;
  }
  res.objective = lasso_objective(A, res.W, T, cfg.l1_coeff);
  return res;
}

Matrix fista_hidden_layer(const Matrix& target, const RandomProjection& proj,
                          const DrnnParams& params, const FistaConfig& cfg, Diagnostics* diag) {
  const auto d = static_cast<Eigen::Index>(params.width);
  if (target.rows() == 0) return Matrix::Zero(d + 1, d);
  const Matrix A = fista_design(target, proj, params, diag);
  return fista_nonneg_lasso(A, target, cfg).W;
}

Matrix rescale_hidden(const Matrix& W, const Matrix& layer_outputs, Diagnostics* diag) {
  const double m = layer_outputs.size() > 0 ? layer_outputs.maxCoeff() : 0.0;
  if (!(m > 0.0)) {
    if (diag) ++diag->rescale_skipped;
    return W;
  }
  return W * (0.1 / m);
}

Matrix pseudo_inverse(const Matrix& A, double rel_tol) {
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix elm_output_layer(const Matrix& H_last, const Matrix& X) {
  return pseudo_inverse(with_bias(H_last)) * X;
}

namespace {

double median_of_sorted(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Hinges tukey_hinges(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return {};
  if (n == 1) return {v[0], v[0]};
  const std::size_t half = n / 2;
  const std::span<const double> all(v);
  return {median_of_sorted(all.first(half)), median_of_sorted(all.last(half))};
}

Vec3 compute_whiskers(const Matrix& Z) {
  Vec3 w{};
  std::vector<double> col(static_cast<std::size_t>(Z.rows()));
  for (std::size_t i = 0; i < kNumStats; ++i) {
    for (Eigen::Index k = 0; k < Z.rows(); ++k) col[static_cast<std::size_t>(k)] = Z(k, static_cast<Eigen::Index>(i));
    const auto h = tukey_hinges(col);
    w[i] = h.upper + 1.5 * (h.upper - h.lower);
  }
  return w;
}

double compute_threshold(std::span<const int> zetas, StdConvention convention) {
  if (zetas.empty()) return 0.0;
  const double n = static_cast<double>(zetas.size());
  const double mean = std::accumulate(zetas.begin(), zetas.end(), 0.0) / n;
  double ss = 0.0;
  for (int z : zetas) ss += (z - mean) * (z - mean);
  const double denom = convention == StdConvention::Sample && zetas.size() > 1 ? n - 1.0 : n;
  return mean + 2.0 * std::sqrt(ss / denom);
}

Matrix hidden_activations(const Matrix& X, const IdsModel& model, const DrnnParams& params,
                          Diagnostics* diag) {
  Matrix h = X;
  for (const auto& W : model.hidden) h = hidden_layer_forward(h, W, params, diag);
  return h;
}

void fit_decision_rule(IdsModel& model, const Matrix& X, const DrnnParams& params,
                       StdConvention convention, Diagnostics* diag) {
  const Matrix Z = (X - drnn_forward(X, model, params, diag)).cwiseAbs();
  model.whiskers = compute_whiskers(Z);
  std::vector<int> zetas(static_cast<std::size_t>(Z.rows()));
  for (Eigen::Index k = 0; k < Z.rows(); ++k) {
    int zeta = 0;
    for (std::size_t i = 0; i < kNumStats; ++i) zeta += Z(k, static_cast<Eigen::Index>(i)) > model.whiskers[i];
    zetas[static_cast<std::size_t>(k)] = zeta;
  }
  model.theta = compute_threshold(zetas, convention);
}

std::optional<IdsModel> local_learn(const TrainSet& train, const DrnnParams& params,
                                    const LearnConfig& cfg,
                                    std::span<const RandomProjection> projections,
                                    Diagnostics* diag) {
  if (train.empty()) {
    if (diag) ++diag->empty_benign_set;
    return std::nullopt;
  }
  if (projections.size() + 1 < params.layers) {
    throw std::invalid_argument("local_learn: one random projection per hidden layer required");
  }
  IdsModel model = IdsModel::zeros(params);
  Matrix input = train.X;
  for (std::size_t h = 0; h + 1 < params.layers; ++h) {
    Matrix W = fista_hidden_layer(input, projections[h], params, cfg.fista, diag);
    W = rescale_hidden(W, hidden_layer_forward(input, W, params, diag), diag);
    input = hidden_layer_forward(input, W, params, diag);
    model.hidden[h] = std::move(W);
  }
  model.output = elm_output_layer(input, train.X);
  fit_decision_rule(model, train.X, params, cfg.threshold_std, diag);
  return model;
}

}  // namespace dofid
