#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dofid/common.hpp"

namespace dofid {

struct WindowRecord;

/// Window-level confusion counts; positive means attack.
struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Ratios with an empty denominator are nullopt ("n/a"), never zero.
struct Metrics {
  Confusion confusion;
  std::optional<double> accuracy, tpr, tnr;
};

Metrics compute_metrics(std::span<const std::uint8_t> decisions,
                        std::span<const std::uint8_t> truths);

/// Mean per-phase time in microseconds over the windows in which the node learned.
struct TimingSummary {
  double learn_us = 0.0;
  double update_us = 0.0;
  double refit_us = 0.0;
  double detect_us = 0.0;
  std::size_t windows = 0;

  double total_us() const { return learn_us + update_us + refit_us + detect_us; }
};

/// Aggregates one node's records; warm-up and frozen windows are excluded.
TimingSummary aggregate_timings(std::span<const WindowRecord> records);

struct NodeReport {
  NodeId node = 0;
  std::string name;
  double window_seconds = 0.0;
  std::size_t windows_evaluated = 0;
  Metrics metrics;
  TimingSummary timing;
};

struct RunReport {
  std::string strategy;
  std::vector<NodeReport> nodes;
  std::string config_json;  // echo of the run configuration
};

/// "n/a" or the value with 4 decimals.
std::string format_ratio(const std::optional<double>& v);

}  // namespace dofid
