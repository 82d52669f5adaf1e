#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dofid/drnn.hpp"

namespace dofid {

/// Benign training matrix: one normalized feature row per benign window.
struct TrainSet {
  Matrix X;                         // |D| x 3, entries in [0, 1]
  std::vector<std::size_t> window_ids;

  std::size_t size() const { return static_cast<std::size_t>(X.rows()); }
  bool empty() const { return X.rows() == 0; }
};

struct FistaConfig {
  double l1_coeff = 1.0;
  int max_iters = 200;
  double tol = 1e-6;       // relative objective change
  int power_iters = 20;    // Lipschitz estimate

  void validate() const;
};

enum class StdConvention { Population, Sample };

struct LearnConfig {
  FistaConfig fista;
  StdConvention threshold_std = StdConvention::Population;
};

/// Fixed random d x d matrix with entries uniform in [0, 1].
struct RandomProjection {
  Matrix weights;
  std::uint64_t seed = 0;

  static RandomProjection from_seed(std::uint64_t seed, std::size_t width);
};

/// Min-max scaling to [0, 1], then z-score over all entries, then a shift so the
/// smallest entry equals 0.001.
Matrix adj_transform(const Matrix& A);

/// Design matrix of the hidden-layer objective: [adj(psi(target * W_R)), 1].
Matrix fista_design(const Matrix& target, const RandomProjection& proj, const DrnnParams& params,
                    Diagnostics* diag = nullptr);

/// ||A W - T||_2^2 + l1 * ||W||_1.
double lasso_objective(const Matrix& A, const Matrix& W, const Matrix& T, double l1);

struct FistaResult {
  Matrix W;
  double objective = 0.0;
  int iterations = 0;
};

/// Non-negative L1-regularized least squares min_{W >= 0} ||A W - T||^2 + l1 ||W||_1
/// by FISTA from the zero matrix with step 1/L.
FistaResult fista_nonneg_lasso(const Matrix& A, const Matrix& T, const FistaConfig& cfg);

/// Learns one hidden layer's weights for the given layer input (which is also
/// the regression target).
Matrix fista_hidden_layer(const Matrix& target, const RandomProjection& proj,
                          const DrnnParams& params, const FistaConfig& cfg,
                          Diagnostics* diag = nullptr);

/// W * 0.1 / max(layer_outputs). Unchanged, and counted, when the max is zero.
Matrix rescale_hidden(const Matrix& W, const Matrix& layer_outputs, Diagnostics* diag = nullptr);

/// Moore-Penrose pseudo-inverse by SVD; singular values below rel_tol * sigma_max
/// are treated as zero.
Matrix pseudo_inverse(const Matrix& A, double rel_tol = 1e-10);

/// Output layer from the last hidden activations: pinv([H_last, 1]) * X.
Matrix elm_output_layer(const Matrix& H_last, const Matrix& X);

/// Tukey hinges of one sample: medians of the lower and upper halves, the
/// median itself excluded from both halves for odd sizes greater than one.
struct Hinges {
  double lower = 0.0;
  double upper = 0.0;
};
Hinges tukey_hinges(std::span<const double> values);

/// Upper whisker Q_U + 1.5 (Q_U - Q_L) of each column of absolute residuals.
Vec3 compute_whiskers(const Matrix& Z);

/// mean + 2 std of the training zetas.
double compute_threshold(std::span<const int> zetas,
                         StdConvention convention = StdConvention::Population);

/// Output of the last hidden layer for every row of X.
Matrix hidden_activations(const Matrix& X, const IdsModel& model, const DrnnParams& params,
                          Diagnostics* diag = nullptr);

/// Sets whiskers and threshold from the model's residuals on the training set.
void fit_decision_rule(IdsModel& model, const Matrix& X, const DrnnParams& params,
                       StdConvention convention, Diagnostics* diag = nullptr);

/// Trains every segment of the detector on benign data. Returns nullopt (and
/// counts diag->empty_benign_set) when the training set is empty.
std::optional<IdsModel> local_learn(const TrainSet& train, const DrnnParams& params,
                                    const LearnConfig& cfg,
                                    std::span<const RandomProjection> projections,
                                    Diagnostics* diag = nullptr);

}  // namespace dofid
