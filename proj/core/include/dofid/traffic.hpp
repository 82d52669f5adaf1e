#pragma once

#include <span>
#include <vector>

#include "dofid/common.hpp"

namespace dofid {

struct PacketRecord {
  double t = 0.0;          // seconds since stream start
  std::uint32_t len = 1;   // bytes
  std::uint8_t label = 0;  // 0 benign, 1 malicious
};

/// Raw per-window statistics.
struct WindowStats {
  double mu = 0.0;      // mean bytes per packet
  double lambda = 0.0;  // packets per second
  double rho = 0.0;     // bytes per second

  Vec3 as_array() const { return {mu, lambda, rho}; }
};

struct WindowFeatures {
  std::size_t index = 0;  // 1-based window index
  WindowStats stats;
  Vec3 x{};               // normalized, each entry in [0, 1]
  std::uint8_t g = 0;     // window-level ground truth
  std::size_t packet_count = 0;
};

/// Running maxima of each statistic over benign-admitted windows.
struct NormState {
  double max_mu = 0.0;
  double max_lambda = 0.0;
  double max_rho = 0.0;

  bool empty() const { return max_mu <= 0.0 && max_lambda <= 0.0 && max_rho <= 0.0; }
  void admit(const WindowStats& s);
};

using PacketGroup = std::span<const PacketRecord>;

/// Splits a time-sorted stream into consecutive windows of length T. Group
/// l (1-based) holds packets with (l-1)T <= t < lT; trailing empty windows are
/// not produced. Throws DataError on unsorted input.
std::vector<PacketGroup> partition_windows(std::span<const PacketRecord> packets, double T);

/// Same as partition_windows but always produces exactly `count` groups,
/// dropping packets past the last one.
std::vector<PacketGroup> partition_windows(std::span<const PacketRecord> packets, double T,
                                           std::size_t count);

WindowStats compute_stats(PacketGroup group, double T);

/// x_i = min(stat_i / max_i, 1). A statistic whose running max is still zero maps
/// to 0; an entirely empty NormState increments diag->normalize_zero.
Vec3 normalize(const WindowStats& stats, const NormState& norm, Diagnostics* diag = nullptr);

/// 1 iff strictly more than half the packets are malicious.
std::uint8_t window_ground_truth(PacketGroup group);

/// Reflects the stream about the midpoint of its span: t -> t_max - t, re-sorted.
std::vector<PacketRecord> flip_time_axis(std::span<const PacketRecord> packets);

/// Full featurization of one stream with a fixed window length. The `x` field is
/// left zero; normalization is causal and performed by the orchestrator.
std::vector<WindowFeatures> featurize(std::span<const PacketRecord> packets, double T);

}  // namespace dofid
