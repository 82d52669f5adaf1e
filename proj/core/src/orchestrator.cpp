#include "dofid/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <thread>

#include "dofid/model_io.hpp"

namespace dofid {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

template <typename Fn>
void for_each_node(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(threads, count);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t projection_seed(std::uint64_t run_seed, NodeId node, std::size_t layer) {
  return mix_seed(mix_seed(run_seed, node), 0x1000 + layer);
}

void RunConfig::validate() const {
  drnn.validate();
  learn.fista.validate();
  federation.validate();
  if (warmup < 1) throw ConfigError("warmup must be at least one window");
}

TrainSet NodeState::training_set() const {
  TrainSet ts;
  ts.X.resize(static_cast<Eigen::Index>(benign_set.size()), kNumStats);
  ts.window_ids = benign_set;
  for (std::size_t r = 0; r < benign_set.size(); ++r) {
    const Vec3 x = normalize(stats_history[benign_set[r] - 1], norm);
    for (std::size_t i = 0; i < kNumStats; ++i) {
      ts.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = x[i];
    }
  }
  return ts;
}

std::vector<Vec3> NodeState::renormalized_history() const {
  std::vector<Vec3> out;
  out.reserve(stats_history.size());
  for (const auto& s : stats_history) out.push_back(normalize(s, norm));
  return out;
}

Simulator::Simulator(std::vector<NodeInput> inputs, RunConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (inputs.empty()) throw ConfigError("scenario has no nodes");
  std::sort(inputs.begin(), inputs.end(), [](const NodeInput& a, const NodeInput& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (inputs[i].id == inputs[i - 1].id) throw ConfigError("duplicate node id");
  }
  windows_ = std::numeric_limits<std::size_t>::max();
  for (auto& in : inputs) {
    if (!(in.window_seconds > 0.0)) throw ConfigError("node " + in.name + ": window length must be positive");
    NodeState n;
    n.id = in.id;
    n.name = in.name;
    n.window_seconds = in.window_seconds;
    n.windows = featurize(in.packets, in.window_seconds);
    for (std::size_t h = 0; h + 1 < cfg_.drnn.layers; ++h) {
      n.projections.push_back(
          RandomProjection::from_seed(projection_seed(cfg_.seed, n.id, h), cfg_.drnn.width));
    }
    windows_ = std::min(windows_, n.windows.size());
    nodes_.push_back(std::move(n));
  }
  if (cfg_.max_windows > 0) windows_ = std::min(windows_, cfg_.max_windows);
}

bool Simulator::learn_phase(NodeState& node, WindowRecord& rec) {
  const auto start = Clock::now();
  auto learned = local_learn(node.training_set(), cfg_.drnn, cfg_.learn, node.projections, &node.diag);
  if (learned) node.snapshot = std::make_shared<const IdsModel>(std::move(*learned));
  rec.learn_us = micros_since(start);
  return learned.has_value();
}

void Simulator::update_phase(NodeState& node, WindowRecord& rec,
                             const std::vector<PeerSnapshot>& published, bool learned) {
  if (!learned) return;
  std::vector<PeerSnapshot> peers;
  for (const auto& p : published) {
    if (p.node_id != node.id && p.model) peers.push_back(p);
  }
  const IdsModel& local = *node.snapshot;
  const auto& fed = cfg_.federation;

  auto start = Clock::now();
  IdsModel merged;
  bool needs_refit = true;
  switch (fed.strategy) {
    case Strategy::NoFederated:
      merged = local;
      needs_refit = false;
      break;
    case Strategy::DofId: {
      const auto history = node.renormalized_history();
      const auto ids = select_concurring(history, node.y_history, peers, cfg_.drnn, fed.theta_cap,
                                         fed.history_cap);
      std::vector<PeerSnapshot> concurring;
      for (const auto& p : peers) {
        if (std::binary_search(ids.begin(), ids.end(), p.node_id)) concurring.push_back(p);
      }
      SegmentChoice choice;
      merged = dfu_merge(local, concurring, fed.c, &choice);
      if (cfg_.trace) {
        rec.concurring = ids;
        if (!concurring.empty()) rec.segments = choice;
      }
      break;
    }
    case Strategy::Average:
      merged = average_merge(local, published);
      break;
    case Strategy::Acn: {
      NodeId chosen = node.id;
      merged = acn_update(local, peers, &chosen);
      if (cfg_.trace && !peers.empty()) rec.acn_peer = chosen;
      break;
    }
    case Strategy::AcnL: {
      SegmentChoice choice;
      merged = acnl_update(local, peers, &choice);
      if (cfg_.trace && !peers.empty()) rec.segments = choice;
      break;
    }
  }
  rec.update_us = micros_since(start);

  if (needs_refit) {
    start = Clock::now();
    merged = refit_output(merged, node.training_set(), cfg_.drnn, &node.diag);
    rec.refit_us = micros_since(start);
  }
  node.model = std::make_shared<const IdsModel>(std::move(merged));
}

void Simulator::detect_phase(NodeState& node, WindowRecord& rec) {
  const auto& w = node.windows[rec.window - 1];
  rec.stats = w.stats;
  rec.g = w.g;
  const auto start = Clock::now();
  rec.x = normalize(w.stats, node.norm, &node.diag);
  if (!rec.warmup && node.model) {
    const auto d = detect(rec.x, *node.model, cfg_.drnn, &node.diag);
    rec.zeta = d.zeta;
    rec.theta = node.model->theta;
    rec.y = d.y;
  }
  rec.detect_us = micros_since(start);

  node.stats_history.push_back(w.stats);
  node.x_history.push_back(rec.x);
  node.y_history.push_back(rec.y);
  if (rec.y == 0) {
    node.benign_set.push_back(rec.window);
    node.norm.admit(w.stats);
  }
  node.frozen = rec.y == 1;
  if (cfg_.trace_models && node.model) {
    rec.model_json = serialize_model({cfg_.drnn, *node.model});
  }
}

std::vector<WindowRecord> Simulator::step_window() {
  if (next_ > windows_) throw std::out_of_range("no windows left");
  const std::size_t l = next_;
  std::vector<WindowRecord> recs(nodes_.size());
  std::vector<char> learned(nodes_.size(), 0);

  // Phase A: local learning on every node that saw no intrusion last window.
  for_each_node(nodes_.size(), cfg_.threads, [&](std::size_t i) {
    auto& node = nodes_[i];
    auto& rec = recs[i];
    rec.node = node.id;
    rec.window = l;
    rec.warmup = l <= cfg_.warmup;
    rec.frozen = !rec.warmup && node.frozen;
    if (rec.warmup || rec.frozen) return;
    learned[i] = learn_phase(node, rec);
  });

  // Barrier: every node sees the same window-l snapshot set. Frozen nodes
  // republish what they published before.
  std::vector<PeerSnapshot> published;
  published.reserve(nodes_.size());
  for (const auto& node : nodes_) published.push_back({node.id, node.snapshot});

  // Phase B: federated update and detection.
  for_each_node(nodes_.size(), cfg_.threads, [&](std::size_t i) {
    update_phase(nodes_[i], recs[i], published, learned[i] != 0);
    detect_phase(nodes_[i], recs[i]);
  });
  ++next_;
  return recs;
}

RunResult run(std::vector<NodeInput> inputs, const RunConfig& cfg) {
  RunResult result;
  result.config = cfg;
  for (const auto& in : inputs) result.node_info.push_back({in.id, in.name, in.window_seconds, {}});
  std::sort(result.node_info.begin(), result.node_info.end(),
            [](const NodeInput& a, const NodeInput& b) { return a.id < b.id; });
  Simulator sim(std::move(inputs), cfg);
  result.records.reserve(sim.window_count() * sim.nodes().size());
  while (sim.next_window() <= sim.window_count()) {
    auto recs = sim.step_window();
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  }
  for (const auto& n : sim.nodes()) result.diagnostics += n.diag;
  return result;
}

}  // namespace dofid
