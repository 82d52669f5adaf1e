// dofid: run federated intrusion-detection scenarios and summarize run logs.
//
//   dofid run <scenario.json> [--strategy S|all] [--seed N] [--warmup N]
//             [--trace] [--trace-models] [--log PATH] [--format table|json_lines|csv]
//   dofid synth <spec.json> --out <packets.csv>
//   dofid metrics <runlog> [--format ...]
//   dofid compare <runlog>... [--strategies A,B,...] [--format ...]
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dofid/dataset.hpp"
#include "dofid/report.hpp"
#include "dofid/scenario.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

dofid::ReportFormat to_format(const std::string& name) {
  const auto f = dofid::parse_report_format(name);
  if (!f) throw dofid::ConfigError("unknown format: " + name);
  return *f;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dofid::ConfigError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_log(const std::string& path, const dofid::RunLog& log) {
  std::ofstream out(path);
  if (!out) throw dofid::DataError("cannot write run log: " + path);
  dofid::write_run_log(out, log);
}

struct RunOptions {
  std::string scenario;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> warmup;
  bool trace = false;
  bool trace_models = false;
  std::string log;
  std::string format = "table";
  bool timing = false;
};

int cmd_run(const RunOptions& o) {
  auto sc = dofid::load_scenario(o.scenario);
  if (o.seed) sc.run.seed = *o.seed;
  if (o.warmup) sc.run.warmup = *o.warmup;
  sc.run.trace = sc.run.trace || o.trace;
  sc.run.trace_models = sc.run.trace_models || o.trace_models;

  std::vector<dofid::Strategy> strategies;
  if (o.strategy.empty()) {
    strategies.push_back(sc.run.federation.strategy);
  } else if (o.strategy == "all") {
    strategies = dofid::all_strategies();
  } else {
    const auto s = dofid::parse_strategy(o.strategy);
    if (!s) throw dofid::ConfigError("unknown strategy: " + o.strategy);
    strategies.push_back(*s);
  }
  sc.run.validate();
  const auto inputs = dofid::materialize(sc);

  std::vector<dofid::RunReport> reports;
  for (auto s : strategies) {
    auto cfg = sc.run;
    cfg.federation.strategy = s;
    const auto log = dofid::to_run_log(dofid::run(inputs, cfg));
    if (!o.log.empty()) {
      const std::string path =
          strategies.size() == 1 ? o.log : o.log + "." + std::string(dofid::strategy_name(s)) + ".jsonl";
      write_log(path, log);
    }
    reports.push_back(dofid::build_report(log));
  }
  dofid::emit_report(std::cout, reports, to_format(o.format));
  if (o.timing) dofid::emit_timing_table(std::cout, reports);
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  auto src = dofid::parse_synth_source(read_text(spec_path));
  if (seed) src.spec.seed = *seed;
  const auto packets = dofid::synth_generate(src.spec, src.duration);
  std::ofstream out(out_path);
  if (!out) throw dofid::DataError("cannot write " + out_path);
  dofid::write_generic_csv(out, packets);
  std::cerr << "wrote " << packets.size() << " packets to " << out_path << '\n';
  return 0;
}

int cmd_metrics(const std::string& path, const std::string& format) {
  const std::vector<dofid::RunReport> reports{dofid::build_report(dofid::read_run_log_file(path))};
  dofid::emit_report(std::cout, reports, to_format(format));
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const std::vector<std::string>& filter,
                const std::string& format) {
  std::vector<dofid::Strategy> wanted;
  for (const auto& name : filter) {
    const auto s = dofid::parse_strategy(name);
    if (!s) throw dofid::ConfigError("unknown strategy: " + name);
    wanted.push_back(*s);
  }
  std::vector<dofid::RunReport> reports;
  for (const auto& p : paths) {
    auto rep = dofid::build_report(dofid::read_run_log_file(p));
    const auto s = dofid::parse_strategy(rep.strategy);
    if (!wanted.empty() && (!s || std::find(wanted.begin(), wanted.end(), *s) == wanted.end())) continue;
    reports.push_back(std::move(rep));
  }
  dofid::emit_report(std::cout, reports, to_format(format));
  if (format == "table") dofid::emit_timing_table(std::cout, reports);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized online federated intrusion detection simulator"};
  app.require_subcommand(1);

  RunOptions ro;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> warmup;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", ro.scenario, "Scenario file (JSON)")->required();
  run->add_option("--strategy", ro.strategy, "NoFederated, DofId, Average, ACN, ACN-L or all");
  run->add_option("--seed", seed, "Override the run seed");
  run->add_option("--warmup", warmup, "Override the warm-up window count");
  run->add_flag("--trace", ro.trace, "Record concurring sets and segment choices");
  run->add_flag("--trace-models", ro.trace_models, "Dump every window's model into the run log");
  run->add_option("--log", ro.log, "Run log path (suffixed per strategy with --strategy all)");
  run->add_option("--format", ro.format, "table, json_lines or csv");
  run->add_flag("--timing", ro.timing, "Append the per-strategy timing table");

  std::string spec_path, out_path;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic packet file");
  synth->add_option("spec", spec_path, "Synthetic spec file (JSON)")->required();
  synth->add_option("--out", out_path, "Output packet csv")->required();
  synth->add_option("--seed", synth_seed, "Override the generator seed");

  std::string log_path, metrics_format = "table";
  auto* metrics = app.add_subcommand("metrics", "Summarize a run log");
  metrics->add_option("runlog", log_path, "Run log (JSON lines)")->required();
  metrics->add_option("--format", metrics_format, "table, json_lines or csv");

  std::vector<std::string> logs, strategies;
  std::string compare_format = "table";
  auto* compare = app.add_subcommand("compare", "Compare run logs of several strategies");
  compare->add_option("runlogs", logs, "Run logs")->required();
  compare->add_option("--strategies", strategies, "Strategies to include")->delimiter(',');
  compare->add_option("--format", compare_format, "table, json_lines or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      ro.seed = seed;
      ro.warmup = warmup;
      return cmd_run(ro);
    }
    if (*synth) return cmd_synth(spec_path, out_path, synth_seed);
    if (*metrics) return cmd_metrics(log_path, metrics_format);
    if (*compare) return cmd_compare(logs, strategies, compare_format);
  } catch (const dofid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dofid::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
