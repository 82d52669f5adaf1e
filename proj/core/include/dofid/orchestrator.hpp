#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dofid/drnn.hpp"
#include "dofid/federation.hpp"
#include "dofid/learning.hpp"
#include "dofid/traffic.hpp"

namespace dofid {

struct RunConfig {
  DrnnParams drnn;
  LearnConfig learn;
  FederationConfig federation;
  std::size_t warmup = 4;      // windows with forced benign decisions
  std::uint64_t seed = 1;
  std::size_t max_windows = 0; // 0: run to the shortest node stream
  std::size_t threads = 1;     // per-node workers within each phase
  bool trace = false;          // record concurring sets and segment choices
  bool trace_models = false;   // dump the post-update model of every window

  void validate() const;
};

/// One node's input: a packet stream and its window length.
struct NodeInput {
  NodeId id = 0;
  std::string name;
  double window_seconds = 1.0;
  std::vector<PacketRecord> packets;
};

/// Per-window outcome of one node, as written to the run log.
struct WindowRecord {
  NodeId node = 0;
  std::size_t window = 0;  // 1-based
  WindowStats stats;
  Vec3 x{};
  int zeta = 0;
  double theta = 0.0;
  std::uint8_t y = 0;
  std::uint8_t g = 0;
  bool warmup = false;
  bool frozen = false;
  double learn_us = 0.0;
  double update_us = 0.0;  // concurrence selection + merge, excluding the refit
  double refit_us = 0.0;
  double detect_us = 0.0;
  std::optional<std::vector<NodeId>> concurring;
  std::optional<SegmentChoice> segments;
  std::optional<NodeId> acn_peer;
  std::optional<std::string> model_json;
};

struct NodeState {
  NodeId id = 0;
  std::string name;
  double window_seconds = 1.0;
  std::vector<WindowFeatures> windows;  // precomputed statistics and ground truth
  NormState norm;
  std::vector<WindowStats> stats_history;
  std::vector<Vec3> x_history;
  std::vector<std::uint8_t> y_history;
  std::vector<std::size_t> benign_set;  // 1-based window indices with y = 0
  std::shared_ptr<const IdsModel> model;     // detector used in the current window
  std::shared_ptr<const IdsModel> snapshot;  // last locally learned model, as published
  bool frozen = false;
  std::vector<RandomProjection> projections;
  Diagnostics diag;

  /// Benign windows normalized with the current maxima.
  TrainSet training_set() const;
  /// Feature history normalized with the current maxima.
  std::vector<Vec3> renormalized_history() const;
};

/// Deterministic per-window protocol over N nodes synchronized by window index.
class Simulator {
 public:
  Simulator(std::vector<NodeInput> inputs, RunConfig cfg);

  std::size_t window_count() const { return windows_; }
  std::size_t next_window() const { return next_; }
  const RunConfig& config() const { return cfg_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }

  /// Advances all nodes through window next_window(); returns one record per node.
  std::vector<WindowRecord> step_window();

 private:
  bool learn_phase(NodeState& node, WindowRecord& rec);
  void update_phase(NodeState& node, WindowRecord& rec, const std::vector<PeerSnapshot>& published,
                    bool learned);
  void detect_phase(NodeState& node, WindowRecord& rec);

  RunConfig cfg_;
  std::vector<NodeState> nodes_;
  std::size_t windows_ = 0;
  std::size_t next_ = 1;
};

struct RunResult {
  RunConfig config;
  std::vector<NodeInput> node_info;  // packets dropped; ids, names, window lengths
  std::vector<WindowRecord> records;
  Diagnostics diagnostics;
};

RunResult run(std::vector<NodeInput> inputs, const RunConfig& cfg);

/// Seed for the random projection of (node, layer) under a run seed.
std::uint64_t projection_seed(std::uint64_t run_seed, NodeId node, std::size_t layer);

/// Stable 64-bit mix used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace dofid
