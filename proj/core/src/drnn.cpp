#include "dofid/drnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dofid {

void DrnnParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("drnn.p must lie in (0, 1)");
  if (!(r > 0.0)) throw ConfigError("drnn.r must be positive");
  if (!(lambda_plus > 0.0)) throw ConfigError("drnn.lambda_plus must be positive");
  if (!(lambda_minus > 0.0)) throw ConfigError("drnn.lambda_minus must be positive");
  if (layers < 2) throw ConfigError("drnn.layers must be at least 2");
  if (width != kNumStats) {
    throw ConfigError("drnn.width must equal the number of traffic statistics (" +
                      std::to_string(kNumStats) + ")");
  }
}

IdsModel IdsModel::zeros(const DrnnParams& params) {
  IdsModel m;
  const auto d = static_cast<Eigen::Index>(params.width);
  m.hidden.assign(params.layers - 1, Matrix::Zero(d + 1, d));
  m.output = Matrix::Zero(d + 1, d);
  return m;
}

bool IdsModel::shape_matches(const DrnnParams& params) const {
  const auto d = static_cast<Eigen::Index>(params.width);
  if (hidden.size() + 1 != params.layers) return false;
  auto ok = [d](const Matrix& W) { return W.rows() == d + 1 && W.cols() == d; };
  return std::all_of(hidden.begin(), hidden.end(), ok) && ok(output);
}

bool operator==(const IdsModel& a, const IdsModel& b) {
  if (a.hidden.size() != b.hidden.size()) return false;
  for (std::size_t h = 0; h < a.hidden.size(); ++h) {
    if (a.hidden[h].rows() != b.hidden[h].rows() || a.hidden[h].cols() != b.hidden[h].cols() ||
        a.hidden[h] != b.hidden[h]) {
      return false;
    }
  }
  return a.output.rows() == b.output.rows() && a.output.cols() == b.output.cols() &&
         a.output == b.output && a.whiskers == b.whiskers && a.theta == b.theta;
}

double psi(double Lambda, const DrnnParams& params, Diagnostics* diag) {
  if (!std::isfinite(Lambda)) throw std::invalid_argument("psi: non-finite input");
  const double denom = params.lambda_minus + Lambda;
  const double a = (params.p * (params.r + params.lambda_plus) + denom) / (2.0 * denom);
  const double b = params.lambda_plus / denom;
  const double radicand = a * a - b;
  double value;
  if (radicand < 0.0) {
    if (diag) ++diag->psi_clamped;
    value = a;
  } else {
    // a - sqrt(a^2 - b) rewritten as b / (a + sqrt(a^2 - b)): no cancellation
    // when both terms approach 1/2 for large inputs.
    value = b / (a + std::sqrt(radicand));
  }
  return std::clamp(value, 0.0, 1.0);
}

Matrix psi(const Matrix& Lambda, const DrnnParams& params, Diagnostics* diag) {
  Matrix out(Lambda.rows(), Lambda.cols());
  for (Eigen::Index j = 0; j < Lambda.cols(); ++j) {
    for (Eigen::Index i = 0; i < Lambda.rows(); ++i) out(i, j) = psi(Lambda(i, j), params, diag);
  }
  return out;
}

Matrix with_bias(const Matrix& A) {
  Matrix out(A.rows(), A.cols() + 1);
  out.leftCols(A.cols()) = A;
  out.col(A.cols()).setOnes();
  return out;
}

Matrix hidden_layer_forward(const Matrix& X, const Matrix& W, const DrnnParams& params,
                            Diagnostics* diag) {
  if (X.cols() + 1 != W.rows()) throw std::invalid_argument("hidden layer shape mismatch");
  return psi(with_bias(X) * W, params, diag);
}

Matrix drnn_forward(const Matrix& X, const IdsModel& model, const DrnnParams& params,
                    Diagnostics* diag) {
  if (!model.shape_matches(params) || X.cols() != static_cast<Eigen::Index>(params.width)) {
    throw std::invalid_argument("drnn_forward: model shape does not match parameters");
  }
  Matrix h = X;
  for (const auto& W : model.hidden) h = hidden_layer_forward(h, W, params, diag);
  return with_bias(h) * model.output;
}

Vec3 drnn_forward(const Vec3& x, const IdsModel& model, const DrnnParams& params,
                  Diagnostics* diag) {
  Matrix row(1, kNumStats);
  for (std::size_t i = 0; i < kNumStats; ++i) row(0, static_cast<Eigen::Index>(i)) = x[i];
  const Matrix out = drnn_forward(row, model, params, diag);
  Vec3 x_hat{};
  for (std::size_t i = 0; i < kNumStats; ++i) x_hat[i] = out(0, static_cast<Eigen::Index>(i));
  return x_hat;
}

int swbc_score(const Vec3& x, const Vec3& x_hat, const Vec3& whiskers) {
  int zeta = 0;
  for (std::size_t i = 0; i < kNumStats; ++i) zeta += std::abs(x[i] - x_hat[i]) > whiskers[i];
  return zeta;
}

Detection detect(const Vec3& x, const IdsModel& model, const DrnnParams& params,
                 Diagnostics* diag) {
  Detection d;
  d.x_hat = drnn_forward(x, model, params, diag);
  d.zeta = swbc_score(x, d.x_hat, model.whiskers);
  d.y = swbc_decide(d.zeta, model.theta);
  return d;
}

}  // namespace dofid
