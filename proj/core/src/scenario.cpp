#include "dofid/scenario.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"

namespace dofid {

using nlohmann::json;

namespace {

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

DrnnParams drnn_from(const json& j) {
  DrnnParams p;
  get_opt(j, "p", p.p);
  get_opt(j, "r", p.r);
  get_opt(j, "lambda_plus", p.lambda_plus);
  get_opt(j, "lambda_minus", p.lambda_minus);
  get_opt(j, "layers", p.layers);
  get_opt(j, "width", p.width);
  get_opt(j, "cluster_size", p.cluster_size);
  return p;
}

json drnn_to(const DrnnParams& p) {
  return {{"p", p.p}, {"r", p.r}, {"lambda_plus", p.lambda_plus}, {"lambda_minus", p.lambda_minus},
          {"layers", p.layers}, {"width", p.width}, {"cluster_size", p.cluster_size}};
}

SynthSpec synth_from(const json& j) {
  SynthSpec s;
  get_opt(j, "rate", s.rate);
  get_opt(j, "len_mean", s.len_mean);
  get_opt(j, "len_std", s.len_std);
  get_opt(j, "attack_rate_mult", s.attack_rate_mult);
  get_opt(j, "attack_len_mult", s.attack_len_mult);
  get_opt(j, "seed", s.seed);
  if (j.contains("attacks")) {
    for (const auto& a : j.at("attacks")) {
      if (a.is_array()) {
        s.attacks.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
      } else {
        s.attacks.push_back({a.at("start").get<double>(), a.at("end").get<double>()});
      }
    }
  }
  return s;
}

void apply_run_block(const json& j, RunConfig& cfg) {
  get_opt(j, "seed", cfg.seed);
  get_opt(j, "warmup", cfg.warmup);
  get_opt(j, "max_windows", cfg.max_windows);
  get_opt(j, "threads", cfg.threads);
  get_opt(j, "trace", cfg.trace);
  get_opt(j, "trace_models", cfg.trace_models);
  if (j.contains("drnn")) cfg.drnn = drnn_from(j.at("drnn"));
  if (j.contains("fista")) {
    const auto& f = j.at("fista");
    get_opt(f, "l1_coeff", cfg.learn.fista.l1_coeff);
    get_opt(f, "max_iters", cfg.learn.fista.max_iters);
    get_opt(f, "tol", cfg.learn.fista.tol);
    get_opt(f, "power_iters", cfg.learn.fista.power_iters);
  }
  if (j.contains("threshold_std")) {
    const auto s = j.at("threshold_std").get<std::string>();
    if (s == "population") cfg.learn.threshold_std = StdConvention::Population;
    else if (s == "sample") cfg.learn.threshold_std = StdConvention::Sample;
    else throw ConfigError("threshold_std must be 'population' or 'sample'");
  }
  if (j.contains("federation")) {
    const auto& f = j.at("federation");
    get_opt(f, "c", cfg.federation.c);
    get_opt(f, "theta_cap", cfg.federation.theta_cap);
    get_opt(f, "history_cap", cfg.federation.history_cap);
    if (f.contains("strategy")) {
      const auto name = f.at("strategy").get<std::string>();
      const auto s = parse_strategy(name);
      if (!s) throw ConfigError("unknown strategy: " + name);
      cfg.federation.strategy = *s;
    }
  }
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  const auto& f = cfg.learn.fista;
  json j = {
      {"seed", cfg.seed},
      {"warmup", cfg.warmup},
      {"max_windows", cfg.max_windows},
      {"threads", cfg.threads},
      {"trace", cfg.trace},
      {"trace_models", cfg.trace_models},
      {"drnn", drnn_to(cfg.drnn)},
      {"fista", {{"l1_coeff", f.l1_coeff}, {"max_iters", f.max_iters}, {"tol", f.tol}, {"power_iters", f.power_iters}}},
      {"threshold_std", cfg.learn.threshold_std == StdConvention::Population ? "population" : "sample"},
      {"federation",
       {{"strategy", std::string(strategy_name(cfg.federation.strategy))},
        {"c", cfg.federation.c},
        {"theta_cap", cfg.federation.theta_cap},
        {"history_cap", cfg.federation.history_cap}}},
  };
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  try {
    RunConfig cfg;
    apply_run_block(json::parse(text), cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run configuration: ") + e.what());
  }
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  Scenario sc;
  try {
    const json j = json::parse(text);
    apply_run_block(j, sc.run);
    if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty()) {
      throw ConfigError("scenario needs a non-empty 'nodes' array");
    }
    NodeId next_id = 0;
    for (const auto& jn : j.at("nodes")) {
      NodeSpec n;
      n.id = jn.value("id", next_id);
      next_id = n.id + 1;
      n.name = jn.value("name", "node" + std::to_string(n.id));
      n.window_seconds = jn.at("window_seconds").get<double>();
      if (jn.contains("source")) {
        const auto& js = jn.at("source");
        FileSource fs;
        fs.path = js.at("path").get<std::string>();
        if (fs.path.is_relative() && !base_dir.empty()) fs.path = base_dir / fs.path;
        const auto fmt_name = js.value("format", std::string("generic"));
        const auto fmt = parse_dataset_format(fmt_name);
        if (!fmt) throw ConfigError("unknown dataset format: " + fmt_name);
        fs.options.format = *fmt;
        fs.options.flip = js.value("flip", false);
        get_opt(js, "max_malformed", fs.options.max_malformed);
        if (js.contains("columns")) {
          const auto& c = js.at("columns");
          auto col = [&c](const char* key) -> std::string {
            if (!c.contains(key)) return {};
            const auto& v = c.at(key);
            return v.is_number_integer() ? std::to_string(v.get<long long>()) : v.get<std::string>();
          };
          fs.options.columns = {col("time"), col("length"), col("label")};
        }
        n.source = std::move(fs);
      } else if (jn.contains("synth")) {
        const auto& js = jn.at("synth");
        SynthSource ss;
        ss.spec = synth_from(js);
        ss.duration = js.at("duration").get<double>();
        ss.explicit_seed = js.contains("seed");
        ss.spec.validate(ss.duration);
        n.source = std::move(ss);
      } else {
        throw ConfigError("node '" + n.name + "' needs a 'source' or 'synth' block");
      }
      sc.nodes.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  sc.run.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_scenario(text, path.parent_path());
}

std::vector<NodeInput> materialize(const Scenario& scenario) {
  std::vector<NodeInput> out;
  for (const auto& n : scenario.nodes) {
    NodeInput in{n.id, n.name, n.window_seconds, {}};
    if (const auto* fs = std::get_if<FileSource>(&n.source)) {
      in.packets = load_dataset(fs->path.string(), fs->options).packets;
    } else {
      const auto& ss = std::get<SynthSource>(n.source);
      SynthSpec spec = ss.spec;
      if (!ss.explicit_seed) spec.seed = mix_seed(mix_seed(scenario.run.seed, n.id), 0x5EED);
      in.packets = synth_generate(spec, ss.duration);
    }
    out.push_back(std::move(in));
  }
  return out;
}

SynthSource parse_synth_source(const std::string& text) {
  try {
    const json j = json::parse(text);
    const json& block = j.contains("synth") ? j.at("synth") : j;
    SynthSource ss;
    ss.spec = synth_from(block);
    ss.duration = block.at("duration").get<double>();
    ss.explicit_seed = block.contains("seed");
    ss.spec.validate(ss.duration);
    return ss;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed synth spec: ") + e.what());
  }
}

}  // namespace dofid
