#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dofid/drnn.hpp"
#include "dofid/learning.hpp"

namespace dofid {

enum class Strategy { NoFederated, DofId, Average, Acn, AcnL };

std::string_view strategy_name(Strategy s);
/// Accepts the canonical names ("NoFederated", "DofId", "Average", "ACN", "ACN-L")
/// case-insensitively, with '-' and '_' interchangeable.
std::optional<Strategy> parse_strategy(std::string_view name);
std::vector<Strategy> all_strategies();

struct FederationConfig {
  double c = 0.75;           // weight of the local segment in a blend
  double theta_cap = 0.65;   // minimum agreement rate for a concurring peer
  Strategy strategy = Strategy::DofId;
  std::size_t history_cap = 0;  // windows replayed for concurrence; 0 = all

  void validate() const;
};

/// Model published by a peer for the current window.
struct PeerSnapshot {
  NodeId node_id = 0;
  std::shared_ptr<const IdsModel> model;
};

/// Peers whose model, replayed over this node's feature history, agrees with
/// this node's own past decisions on at least `theta_cap` of the windows.
/// Only the most recent `history_cap` windows are replayed when it is nonzero.
std::vector<NodeId> select_concurring(std::span<const Vec3> x_history,
                                      std::span<const std::uint8_t> y_history,
                                      std::span<const PeerSnapshot> peers,
                                      const DrnnParams& params, double theta_cap,
                                      std::size_t history_cap = 0);

/// Agreement fraction of one model over a decision history.
double agreement_rate(const IdsModel& model, std::span<const Vec3> x_history,
                      std::span<const std::uint8_t> y_history, const DrnnParams& params);

/// Peers chosen for each segment by closest value; ties go to the lowest id.
struct SegmentChoice {
  std::vector<NodeId> layers;
  std::array<NodeId, kNumStats> whiskers{};
  NodeId theta = 0;
};

/// Entry-wise L1 distance between two matrices of equal shape.
double l1_distance(const Matrix& a, const Matrix& b);

/// Distance over hidden layers, whiskers and threshold; the output layer is
/// excluded because every strategy refits it locally.
double combined_distance(const IdsModel& a, const IdsModel& b);

/// Empty `peers` returns nullopt.
std::optional<SegmentChoice> closest_segments(const IdsModel& local,
                                              std::span<const PeerSnapshot> peers);

/// a + (1 - c)(b - a): exact identity when c == 1 or a == b.
double blend(double local, double peer, double c);
Matrix blend(const Matrix& local, const Matrix& peer, double c);

/// Per-segment closest-peer blend over the concurring peers. The output layer is
/// left untouched; callers refit it.
IdsModel dfu_merge(const IdsModel& local, std::span<const PeerSnapshot> concurring, double c,
                   SegmentChoice* choice = nullptr);

/// Recomputes the output layer on the training set through the current hidden
/// layers. Empty training set: unchanged, counted in diag->refit_skipped.
IdsModel refit_output(const IdsModel& model, const TrainSet& train, const DrnnParams& params,
                      Diagnostics* diag = nullptr);

/// Arithmetic mean of hidden layers, whiskers and threshold over all models,
/// copied into each (output layers are kept per node).
std::vector<IdsModel> average_update(std::span<const IdsModel> models);

/// One node's share of average_update: the mean over every published snapshot
/// (including its own, in the same order on every node) with the local output layer.
IdsModel average_merge(const IdsModel& local, std::span<const PeerSnapshot> everyone);

/// Blend every segment 50/50 with the single peer of smallest combined distance.
IdsModel acn_update(const IdsModel& local, std::span<const PeerSnapshot> peers,
                    NodeId* chosen = nullptr);

/// Blend each segment 50/50 with that segment's closest peer among all peers.
IdsModel acnl_update(const IdsModel& local, std::span<const PeerSnapshot> peers,
                     SegmentChoice* choice = nullptr);

}  // namespace dofid
