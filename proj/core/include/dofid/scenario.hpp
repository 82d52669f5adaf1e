#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "dofid/dataset.hpp"
#include "dofid/orchestrator.hpp"
#include "dofid/synth.hpp"

namespace dofid {

struct FileSource {
  std::filesystem::path path;  // resolved against the scenario file's directory
  LoadOptions options;
};

struct SynthSource {
  SynthSpec spec;
  double duration = 0.0;
  bool explicit_seed = false;  // otherwise derived from the run seed and node id
};

struct NodeSpec {
  NodeId id = 0;
  std::string name;
  double window_seconds = 1.0;
  std::variant<FileSource, SynthSource> source;
};

/// Parsed scenario file: per-node sources plus the global run configuration.
struct Scenario {
  RunConfig run;
  std::vector<NodeSpec> nodes;
};

/// JSON scenario document. Throws ConfigError on invalid content.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Loads or generates every node's packet stream.
std::vector<NodeInput> materialize(const Scenario& scenario);

/// Synthetic generator spec file: a synth block plus "duration".
SynthSource parse_synth_source(const std::string& text);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

}  // namespace dofid
