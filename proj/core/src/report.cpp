#include "dofid/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dofid/scenario.hpp"
#include "json.hpp"

namespace dofid {

using nlohmann::json;

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json ratio_json(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

json record_to_json(const WindowRecord& r) {
  json j = {
      {"type", "window"},
      {"node", r.node},
      {"l", r.window},
      {"mu", r.stats.mu},
      {"lambda", r.stats.lambda},
      {"rho", r.stats.rho},
      {"x", r.x},
      {"zeta", r.zeta},
      {"theta", r.theta},
      {"y", r.y},
      {"g", r.g},
      {"warmup", r.warmup},
      {"frozen", r.frozen},
      {"learn_us", r.learn_us},
      {"update_us", r.update_us},
      {"refit_us", r.refit_us},
      {"detect_us", r.detect_us},
  };
  if (r.concurring) j["concurring"] = *r.concurring;
  if (r.segments) {
    j["segments"] = {{"layers", r.segments->layers},
                     {"whiskers", r.segments->whiskers},
                     {"theta", r.segments->theta}};
  }
  if (r.acn_peer) j["acn_peer"] = *r.acn_peer;
  if (r.model_json) j["model"] = json::parse(*r.model_json);
  return j;
}

WindowRecord record_from_json(const json& j) {
  WindowRecord r;
  r.node = j.at("node").get<NodeId>();
  r.window = j.at("l").get<std::size_t>();
  r.stats = {j.at("mu").get<double>(), j.at("lambda").get<double>(), j.at("rho").get<double>()};
  r.x = j.at("x").get<Vec3>();
  r.zeta = j.at("zeta").get<int>();
  r.theta = j.at("theta").get<double>();
  r.y = j.at("y").get<std::uint8_t>();
  r.g = j.at("g").get<std::uint8_t>();
  r.warmup = j.at("warmup").get<bool>();
  r.frozen = j.at("frozen").get<bool>();
  r.learn_us = j.at("learn_us").get<double>();
  r.update_us = j.at("update_us").get<double>();
  r.refit_us = j.at("refit_us").get<double>();
  r.detect_us = j.at("detect_us").get<double>();
  if (j.contains("concurring")) r.concurring = j.at("concurring").get<std::vector<NodeId>>();
  if (j.contains("segments")) {
    SegmentChoice s;
    const auto& js = j.at("segments");
    s.layers = js.at("layers").get<std::vector<NodeId>>();
    s.whiskers = js.at("whiskers").get<std::array<NodeId, kNumStats>>();
    s.theta = js.at("theta").get<NodeId>();
    r.segments = s;
  }
  if (j.contains("acn_peer")) r.acn_peer = j.at("acn_peer").get<NodeId>();
  if (j.contains("model")) r.model_json = j.at("model").dump();
  return r;
}

}  // namespace

RunLog to_run_log(const RunResult& result) {
  RunLog log;
  log.strategy = std::string(strategy_name(result.config.federation.strategy));
  log.config_json = config_to_json(result.config);
  log.nodes = result.node_info;
  log.records = result.records;
  return log;
}

void write_run_log(std::ostream& out, const RunLog& log) {
  json nodes = json::array();
  for (const auto& n : log.nodes) {
    nodes.push_back({{"id", n.id}, {"name", n.name}, {"window_seconds", n.window_seconds}});
  }
  json header = {{"type", "run"},
                 {"strategy", log.strategy},
                 {"config", json::parse(log.config_json)},
                 {"nodes", std::move(nodes)}};
  out << header.dump() << '\n';
  for (const auto& r : log.records) out << record_to_json(r).dump() << '\n';
}

RunLog read_run_log(std::istream& in) {
  RunLog log;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "run") {
        log.strategy = j.at("strategy").get<std::string>();
        log.config_json = j.at("config").dump();
        for (const auto& n : j.at("nodes")) {
          log.nodes.push_back({n.at("id").get<NodeId>(), n.at("name").get<std::string>(),
                               n.at("window_seconds").get<double>(), {}});
        }
        have_header = true;
      } else if (type == "window") {
        log.records.push_back(record_from_json(j));
      }
    } catch (const json::exception& e) {
      throw DataError("run log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw DataError("run log has no header record");
  return log;
}

RunLog read_run_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run log: " + path);
  return read_run_log(in);
}

RunReport build_report(const RunLog& log) {
  RunReport rep;
  rep.strategy = log.strategy;
  rep.config_json = log.config_json;
  std::map<NodeId, std::vector<WindowRecord>> by_node;
  for (const auto& r : log.records) by_node[r.node].push_back(r);
  for (const auto& n : log.nodes) {
    NodeReport nr;
    nr.node = n.id;
    nr.name = n.name;
    nr.window_seconds = n.window_seconds;
    const auto& recs = by_node[n.id];
    std::vector<std::uint8_t> y, g;
    for (const auto& r : recs) {
      if (r.warmup) continue;
      y.push_back(r.y);
      g.push_back(r.g);
    }
    nr.windows_evaluated = y.size();
    nr.metrics = compute_metrics(y, g);
    nr.timing = aggregate_timings(recs);
    rep.nodes.push_back(std::move(nr));
  }
  return rep;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "json_lines" || name == "jsonl") return ReportFormat::JsonLines;
  if (name == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

void emit_report(std::ostream& out, std::span<const RunReport> reports, ReportFormat format) {
  switch (format) {
    case ReportFormat::Table: {
      out << "# metrics over all post-warm-up windows; positive = attack\n";
      out << std::left << std::setw(14) << "node" << std::setw(13) << "strategy" << std::setw(8)
          << "acc" << std::setw(8) << "tpr" << std::setw(8) << "tnr" << std::setw(6) << "TP"
          << std::setw(6) << "TN" << std::setw(6) << "FP" << std::setw(6) << "FN" << "windows\n";
      for (const auto& rep : reports) {
        for (const auto& n : rep.nodes) {
          const auto& m = n.metrics;
          out << std::left << std::setw(14) << n.name << std::setw(13) << rep.strategy
              << std::setw(8) << format_ratio(m.accuracy) << std::setw(8) << format_ratio(m.tpr)
              << std::setw(8) << format_ratio(m.tnr) << std::setw(6) << m.confusion.tp
              << std::setw(6) << m.confusion.tn << std::setw(6) << m.confusion.fp << std::setw(6)
              << m.confusion.fn << n.windows_evaluated << '\n';
        }
      }
      break;
    }
    case ReportFormat::JsonLines:
      for (const auto& rep : reports) {
        for (const auto& n : rep.nodes) {
          const auto& m = n.metrics;
          json j = {{"node", n.name},
                    {"node_id", n.node},
                    {"strategy", rep.strategy},
                    {"accuracy", ratio_json(m.accuracy)},
                    {"tpr", ratio_json(m.tpr)},
                    {"tnr", ratio_json(m.tnr)},
                    {"tp", m.confusion.tp},
                    {"tn", m.confusion.tn},
                    {"fp", m.confusion.fp},
                    {"fn", m.confusion.fn},
                    {"windows", n.windows_evaluated},
                    {"window_seconds", n.window_seconds},
                    {"learn_us", n.timing.learn_us},
                    {"update_us", n.timing.update_us},
                    {"refit_us", n.timing.refit_us},
                    {"detect_us", n.timing.detect_us},
                    {"total_us", n.timing.total_us()}};
          out << j.dump() << '\n';
        }
      }
      break;
    case ReportFormat::Csv:
      out << "node,strategy,accuracy,tpr,tnr,tp,tn,fp,fn,windows,learn_us,update_us,refit_us,detect_us\n";
      for (const auto& rep : reports) {
        for (const auto& n : rep.nodes) {
          const auto& m = n.metrics;
          auto ratio = [](const std::optional<double>& v) { return v ? full_precision(*v) : std::string("n/a"); };
          out << n.name << ',' << rep.strategy << ',' << ratio(m.accuracy) << ',' << ratio(m.tpr) << ','
              << ratio(m.tnr) << ',' << m.confusion.tp << ',' << m.confusion.tn << ',' << m.confusion.fp
              << ',' << m.confusion.fn << ',' << n.windows_evaluated << ',' << full_precision(n.timing.learn_us)
              << ',' << full_precision(n.timing.update_us) << ',' << full_precision(n.timing.refit_us) << ','
              << full_precision(n.timing.detect_us) << '\n';
        }
      }
      break;
  }
}

void emit_timing_table(std::ostream& out, std::span<const RunReport> reports) {
  if (reports.empty()) return;
  const auto& nodes = reports.front().nodes;
  auto row = [&](const std::string& label, const RunReport& rep, auto value) {
    out << std::left << std::setw(22) << label;
    for (const auto& n : rep.nodes) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", value(n.timing));
      out << std::right << std::setw(14) << buf;
    }
    out << '\n';
  };
  out << "# average time per window in microseconds (non-frozen, post-warm-up windows)\n";
  out << std::left << std::setw(22) << "federated update";
  for (const auto& n : nodes) out << std::right << std::setw(14) << n.name;
  out << '\n';
  for (const auto& rep : reports) row(rep.strategy, rep, [](const TimingSummary& t) { return t.update_us; });
  out << std::left << std::setw(22) << "summary";
  for (const auto& n : nodes) out << std::right << std::setw(14) << n.name;
  out << '\n';
  for (const auto& rep : reports) {
    row(rep.strategy + " learn", rep, [](const TimingSummary& t) { return t.learn_us; });
    row(rep.strategy + " refit", rep, [](const TimingSummary& t) { return t.refit_us; });
    row(rep.strategy + " detect", rep, [](const TimingSummary& t) { return t.detect_us; });
    row(rep.strategy + " total", rep, [](const TimingSummary& t) { return t.total_us(); });
  }
}

std::vector<MetricRow> parse_report_csv(std::istream& in) {
  std::vector<MetricRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw DataError("metrics csv: expected 14 fields, got " + std::to_string(f.size()));
    auto ratio = [](const std::string& s) -> std::optional<double> {
      if (s == "n/a") return std::nullopt;
      return std::stod(s);
    };
    MetricRow r;
    r.node = f[0];
    r.strategy = f[1];
    r.accuracy = ratio(f[2]);
    r.tpr = ratio(f[3]);
    r.tnr = ratio(f[4]);
    r.confusion = {std::stoul(f[5]), std::stoul(f[6]), std::stoul(f[7]), std::stoul(f[8])};
    r.windows = std::stoul(f[9]);
    r.learn_us = std::stod(f[10]);
    r.update_us = std::stod(f[11]);
    r.refit_us = std::stod(f[12]);
    r.detect_us = std::stod(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dofid
