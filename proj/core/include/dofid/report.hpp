#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dofid/metrics.hpp"
#include "dofid/orchestrator.hpp"

namespace dofid {

/// Everything a run log carries: header plus one record per (node, window).
struct RunLog {
  std::string strategy;
  std::string config_json;
  std::vector<NodeInput> nodes;  // packets empty
  std::vector<WindowRecord> records;
};

RunLog to_run_log(const RunResult& result);

/// JSON lines: a "run" header line, then one "window" line per node and window
/// in window-major order.
void write_run_log(std::ostream& out, const RunLog& log);
RunLog read_run_log(std::istream& in);
RunLog read_run_log_file(const std::string& path);

/// Metrics over post-warm-up windows and timing means per node.
RunReport build_report(const RunLog& log);

enum class ReportFormat { Table, JsonLines, Csv };
std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Per-node metric rows for each report, in report order then node order.
/// Table columns: node, strategy, acc, tpr, tnr, then confusion counts.
void emit_report(std::ostream& out, std::span<const RunReport> reports, ReportFormat format);

/// Rows are strategies, columns are nodes; entries are mean federated-update
/// times in microseconds, followed by learn/detect/total summaries.
void emit_timing_table(std::ostream& out, std::span<const RunReport> reports);

/// One parsed csv metrics row.
struct MetricRow {
  std::string node;
  std::string strategy;
  std::optional<double> accuracy, tpr, tnr;
  Confusion confusion;
  std::size_t windows = 0;
  double learn_us = 0.0, update_us = 0.0, refit_us = 0.0, detect_us = 0.0;
};
std::vector<MetricRow> parse_report_csv(std::istream& in);

}  // namespace dofid
