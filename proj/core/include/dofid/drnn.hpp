#pragma once

#include <vector>

#include "dofid/common.hpp"

namespace dofid {

/// Parameters of the clustered random-neural-network activation and topology.
struct DrnnParams {
  double p = 0.05;             // probability a triggered neuron forwards the trigger
  double r = 0.001;            // firing rate
  double lambda_plus = 0.1;    // excitatory external spike rate
  double lambda_minus = 0.1;   // inhibitory external spike rate
  std::size_t layers = 3;      // H: hidden layers + linear output layer
  std::size_t width = kNumStats;  // neurons per layer
  std::size_t cluster_size = 10;  // recorded only; does not enter the activation

  /// Throws ConfigError when the parameters are out of range. The layer width
  /// must equal the number of statistics: every weight matrix maps a biased
  /// layer input back onto the statistics space.
  void validate() const;
};

/// Full parameter set of one node's detector.
struct IdsModel {
  std::vector<Matrix> hidden;  // H-1 matrices, (d+1) x d, non-negative; bias row last
  Matrix output;               // (d+1) x d; bias row last
  Vec3 whiskers{};
  double theta = 0.0;

  /// All-zero model with the shapes implied by `params`.
  static IdsModel zeros(const DrnnParams& params);

  bool shape_matches(const DrnnParams& params) const;

  friend bool operator==(const IdsModel& a, const IdsModel& b);
};

/// Closed-form cluster activation. A negative radicand is clamped to zero
/// (counted in diag->psi_clamped); the result is clamped into [0, 1].
double psi(double Lambda, const DrnnParams& params, Diagnostics* diag = nullptr);

/// Elementwise psi over a matrix.
Matrix psi(const Matrix& Lambda, const DrnnParams& params, Diagnostics* diag = nullptr);

/// Appends a column of ones: [A, 1].
Matrix with_bias(const Matrix& A);

/// Applies hidden layer `W` to a batch of row vectors: psi([X, 1] W).
Matrix hidden_layer_forward(const Matrix& X, const Matrix& W, const DrnnParams& params,
                            Diagnostics* diag = nullptr);

/// Batch forward pass; each row of X is one input vector.
Matrix drnn_forward(const Matrix& X, const IdsModel& model, const DrnnParams& params,
                    Diagnostics* diag = nullptr);

Vec3 drnn_forward(const Vec3& x, const IdsModel& model, const DrnnParams& params,
                  Diagnostics* diag = nullptr);

/// Number of statistics whose absolute residual strictly exceeds its whisker.
int swbc_score(const Vec3& x, const Vec3& x_hat, const Vec3& whiskers);

/// 1 iff zeta > theta.
inline std::uint8_t swbc_decide(int zeta, double theta) {
  return static_cast<double>(zeta) > theta ? 1 : 0;
}

struct Detection {
  std::uint8_t y = 0;
  int zeta = 0;
  Vec3 x_hat{};
};

Detection detect(const Vec3& x, const IdsModel& model, const DrnnParams& params,
                 Diagnostics* diag = nullptr);

}  // namespace dofid
