#include "dofid/federation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

namespace dofid {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::NoFederated: return "NoFederated";
    case Strategy::DofId: return "DofId";
    case Strategy::Average: return "Average";
    case Strategy::Acn: return "ACN";
    case Strategy::AcnL: return "ACN-L";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '-' || ch == '_') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (key == "nofederated" || key == "none" || key == "local") return Strategy::NoFederated;
  if (key == "dofid" || key == "dfu") return Strategy::DofId;
  if (key == "average" || key == "avg") return Strategy::Average;
  if (key == "acn") return Strategy::Acn;
  if (key == "acnl") return Strategy::AcnL;
  return std::nullopt;
}

std::vector<Strategy> all_strategies() {
  return {Strategy::NoFederated, Strategy::DofId, Strategy::Average, Strategy::Acn, Strategy::AcnL};
}

void FederationConfig::validate() const {
  if (!(c >= 0.5 && c <= 1.0)) throw ConfigError("federation.c must lie in [0.5, 1]");
  if (!(theta_cap >= 0.0 && theta_cap <= 1.0)) {
    throw ConfigError("federation.theta_cap must lie in [0, 1]");
  }
}

double agreement_rate(const IdsModel& model, std::span<const Vec3> x_history,
                      std::span<const std::uint8_t> y_history, const DrnnParams& params) {
  if (x_history.size() != y_history.size()) {
    throw std::invalid_argument("agreement_rate: history lengths differ");
  }
  if (x_history.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t k = 0; k < x_history.size(); ++k) {
    agree += detect(x_history[k], model, params).y == y_history[k];
  }
  return static_cast<double>(agree) / static_cast<double>(x_history.size());
}

std::vector<NodeId> select_concurring(std::span<const Vec3> x_history,
                                      std::span<const std::uint8_t> y_history,
                                      std::span<const PeerSnapshot> peers,
                                      const DrnnParams& params, double theta_cap,
                                      std::size_t history_cap) {
  if (history_cap > 0 && x_history.size() > history_cap) {
    x_history = x_history.last(history_cap);
    y_history = y_history.last(history_cap);
  }
  std::vector<NodeId> out;
  for (const auto& peer : peers) {
    if (!peer.model) continue;
    if (agreement_rate(*peer.model, x_history, y_history, params) >= theta_cap) {
      out.push_back(peer.node_id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double l1_distance(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().sum(); }

double combined_distance(const IdsModel& a, const IdsModel& b) {
  double d = 0.0;
  for (std::size_t h = 0; h < a.hidden.size(); ++h) d += l1_distance(a.hidden[h], b.hidden[h]);
  for (std::size_t i = 0; i < kNumStats; ++i) d += std::abs(a.whiskers[i] - b.whiskers[i]);
  return d + std::abs(a.theta - b.theta);
}

namespace {

// Index into `peers` of the smallest distance; ties go to the lowest node id.
template <typename Dist>
std::size_t argmin_peer(std::span<const PeerSnapshot> peers, Dist&& dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < peers.size(); ++m) {
    const double d = dist(*peers[m].model);
    if (d < best_d || (d == best_d && peers[m].node_id < peers[best].node_id)) {
      best = m;
      best_d = d;
    }
  }
  return best;
}

struct SegmentIndex {
  std::vector<std::size_t> layers;
  std::array<std::size_t, kNumStats> whiskers{};
  std::size_t theta = 0;
};

SegmentIndex closest_segment_index(const IdsModel& local, std::span<const PeerSnapshot> peers) {
  SegmentIndex idx;
  for (std::size_t h = 0; h < local.hidden.size(); ++h) {
    idx.layers.push_back(argmin_peer(
        peers, [&](const IdsModel& m) { return l1_distance(local.hidden[h], m.hidden[h]); }));
  }
  for (std::size_t i = 0; i < kNumStats; ++i) {
    idx.whiskers[i] = argmin_peer(
        peers, [&](const IdsModel& m) { return std::abs(local.whiskers[i] - m.whiskers[i]); });
  }
  idx.theta = argmin_peer(peers, [&](const IdsModel& m) { return std::abs(local.theta - m.theta); });
  return idx;
}

IdsModel blend_segments(const IdsModel& local, std::span<const PeerSnapshot> peers,
                        const SegmentIndex& idx, double c) {
  IdsModel out = local;
  for (std::size_t h = 0; h < local.hidden.size(); ++h) {
    out.hidden[h] = blend(local.hidden[h], peers[idx.layers[h]].model->hidden[h], c);
  }
  for (std::size_t i = 0; i < kNumStats; ++i) {
    out.whiskers[i] = blend(local.whiskers[i], peers[idx.whiskers[i]].model->whiskers[i], c);
  }
  out.theta = blend(local.theta, peers[idx.theta].model->theta, c);
  return out;
}

SegmentChoice to_choice(const SegmentIndex& idx, std::span<const PeerSnapshot> peers) {
  SegmentChoice ch;
  for (auto m : idx.layers) ch.layers.push_back(peers[m].node_id);
  for (std::size_t i = 0; i < kNumStats; ++i) ch.whiskers[i] = peers[idx.whiskers[i]].node_id;
  ch.theta = peers[idx.theta].node_id;
  return ch;
}

std::vector<PeerSnapshot> usable(std::span<const PeerSnapshot> peers) {
  std::vector<PeerSnapshot> out;
  for (const auto& p : peers) {
    if (p.model) out.push_back(p);
  }
  return out;
}

}  // namespace

std::optional<SegmentChoice> closest_segments(const IdsModel& local,
                                              std::span<const PeerSnapshot> peers) {
  const auto live = usable(peers);
  if (live.empty()) return std::nullopt;
  return to_choice(closest_segment_index(local, live), live);
}

double blend(double local, double peer, double c) { return local + (1.0 - c) * (peer - local); }

Matrix blend(const Matrix& local, const Matrix& peer, double c) {
  return local + (1.0 - c) * (peer - local);
}

IdsModel dfu_merge(const IdsModel& local, std::span<const PeerSnapshot> concurring, double c,
                   SegmentChoice* choice) {
  const auto live = usable(concurring);
  if (live.empty()) return local;
  const auto idx = closest_segment_index(local, live);
  if (choice) *choice = to_choice(idx, live);
  return blend_segments(local, live, idx, c);
}

IdsModel refit_output(const IdsModel& model, const TrainSet& train, const DrnnParams& params,
                      Diagnostics* diag) {
  if (train.empty()) {
    if (diag) ++diag->refit_skipped;
    return model;
  }
  IdsModel out = model;
  out.output = elm_output_layer(hidden_activations(train.X, model, params, diag), train.X);
  return out;
}

namespace {

// Writes the segment means into `out`, whose shapes must match. mean = first + sum(m - first) / N,
// so a consensus is a fixed point bit for bit.
template <class Get>
void mean_segments(std::size_t count, Get get, IdsModel& out) {
  const double n = static_cast<double>(count);
  const IdsModel& first = get(0);
  for (std::size_t h = 0; h < first.hidden.size(); ++h) {
    const Matrix& f = first.hidden[h];
    Matrix& dst = out.hidden[h];
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      for (Eigen::Index r = 0; r < f.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < count; ++k) acc += get(k).hidden[h](r, c) - f(r, c);
        dst(r, c) = f(r, c) + acc / n;
      }
    }
  }
  for (std::size_t i = 0; i < kNumStats; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += get(k).whiskers[i] - first.whiskers[i];
    out.whiskers[i] = first.whiskers[i] + acc / n;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += get(k).theta - first.theta;
  out.theta = first.theta + acc / n;
}

}  // namespace

std::vector<IdsModel> average_update(std::span<const IdsModel> models) {
  if (models.size() <= 1) return {models.begin(), models.end()};
  IdsModel mean = models.front();
  mean_segments(models.size(), [&](std::size_t k) -> const IdsModel& { return models[k]; }, mean);
  std::vector<IdsModel> out;
  out.reserve(models.size());
  for (const auto& m : models) {
    IdsModel updated = mean;
    updated.output = m.output;
    out.push_back(std::move(updated));
  }
  return out;
}

IdsModel average_merge(const IdsModel& local, std::span<const PeerSnapshot> everyone) {
  std::array<const IdsModel*, 64> small{};
  std::vector<const IdsModel*> large;
  std::size_t count = 0;
  for (const auto& p : everyone) {
    if (!p.model) continue;
    if (count < small.size()) {
      small[count] = p.model.get();
    } else {
      if (large.empty()) large.assign(small.begin(), small.end());
      large.push_back(p.model.get());
    }
    ++count;
  }
  if (count == 0) return local;
  const IdsModel* const* list = large.empty() ? small.data() : large.data();
  IdsModel mean = local;
  mean_segments(count, [&](std::size_t k) -> const IdsModel& { return *list[k]; }, mean);
  return mean;
}

IdsModel acn_update(const IdsModel& local, std::span<const PeerSnapshot> peers, NodeId* chosen) {
  const auto live = usable(peers);
  if (live.empty()) return local;
  const std::size_t best =
      argmin_peer(std::span<const PeerSnapshot>(live), [&](const IdsModel& m) { return combined_distance(local, m); });
  if (chosen) *chosen = live[best].node_id;
  SegmentIndex idx;
  idx.layers.assign(local.hidden.size(), best);
  idx.whiskers.fill(best);
  idx.theta = best;
  return blend_segments(local, live, idx, 0.5);
}

IdsModel acnl_update(const IdsModel& local, std::span<const PeerSnapshot> peers,
                     SegmentChoice* choice) {
  return dfu_merge(local, peers, 0.5, choice);
}

}  // namespace dofid
