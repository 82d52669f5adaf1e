#include "dofid/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dofid {

void NormState::admit(const WindowStats& s) {
  max_mu = std::max(max_mu, s.mu);
  max_lambda = std::max(max_lambda, s.lambda);
  max_rho = std::max(max_rho, s.rho);
}

namespace {

void check_window_length(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("window length must be positive and finite");
  }
}

void check_sorted(std::span<const PacketRecord> packets) {
  auto it = std::is_sorted_until(packets.begin(), packets.end(),
                                 [](const PacketRecord& a, const PacketRecord& b) { return a.t < b.t; });
  if (it != packets.end()) {
    throw DataError("packet stream not sorted by time at record " +
                    std::to_string(std::distance(packets.begin(), it)));
  }
  if (!packets.empty() && packets.front().t < 0.0) {
    throw DataError("packet stream has negative timestamps");
  }
}

}  // namespace

std::vector<PacketGroup> partition_windows(std::span<const PacketRecord> packets, double T,
                                           std::size_t count) {
  check_window_length(T);
  check_sorted(packets);
  std::vector<PacketGroup> groups;
  groups.reserve(count);
  auto it = packets.begin();
  for (std::size_t l = 1; l <= count; ++l) {
    const double hi = static_cast<double>(l) * T;
    auto end = std::find_if(it, packets.end(), [hi](const PacketRecord& p) { return p.t >= hi; });
    groups.emplace_back(it, end);
    it = end;
  }
  return groups;
}

std::vector<PacketGroup> partition_windows(std::span<const PacketRecord> packets, double T) {
  check_window_length(T);
  if (packets.empty()) return {};
  check_sorted(packets);
  const auto count = static_cast<std::size_t>(std::floor(packets.back().t / T)) + 1;
  return partition_windows(packets, T, count);
}

WindowStats compute_stats(PacketGroup group, double T) {
  check_window_length(T);
  if (group.empty()) return {};
  double bytes = 0.0;
  for (const auto& p : group) bytes += static_cast<double>(p.len);
  const auto n = static_cast<double>(group.size());
  const double rho = bytes / T;
  const double lambda = n / T;
  return {bytes / n, lambda, rho};
}

Vec3 normalize(const WindowStats& stats, const NormState& norm, Diagnostics* diag) {
  if (norm.empty()) {
    if (diag) ++diag->normalize_zero;
    return {0.0, 0.0, 0.0};
  }
  const Vec3 s = stats.as_array();
  const Vec3 m = {norm.max_mu, norm.max_lambda, norm.max_rho};
  Vec3 x{};
  for (std::size_t i = 0; i < kNumStats; ++i) {
    x[i] = m[i] > 0.0 ? std::clamp(s[i] / m[i], 0.0, 1.0) : 0.0;
  }
  return x;
}

std::uint8_t window_ground_truth(PacketGroup group) {
  if (group.empty()) return 0;
  std::size_t malicious = 0;
  for (const auto& p : group) malicious += p.label != 0;
  // malicious / n > 0.5 without a division
  return 2 * malicious > group.size() ? 1 : 0;
}

std::vector<PacketRecord> flip_time_axis(std::span<const PacketRecord> packets) {
  if (packets.empty()) return {};
  double t_max = packets.front().t;
  for (const auto& p : packets) t_max = std::max(t_max, p.t);
  std::vector<PacketRecord> out(packets.begin(), packets.end());
  for (auto& p : out) p.t = t_max - p.t;
  std::stable_sort(out.begin(), out.end(),
                   [](const PacketRecord& a, const PacketRecord& b) { return a.t < b.t; });
  return out;
}

std::vector<WindowFeatures> featurize(std::span<const PacketRecord> packets, double T) {
  const auto groups = partition_windows(packets, T);
  std::vector<WindowFeatures> out;
  out.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    WindowFeatures w;
    w.index = i + 1;
    w.stats = compute_stats(groups[i], T);
    w.g = window_ground_truth(groups[i]);
    w.packet_count = groups[i].size();
    out.push_back(w);
  }
  return out;
}

}  // namespace dofid
