#include <gtest/gtest.h>

#include "dofid/scenario.hpp"

namespace dofid {
namespace {

const std::string kData = DOFID_TEST_DATA_DIR;

TEST(Scenario, LoadsFileAndSynthNodes) {
  const auto sc = load_scenario(kData + "/scenario_file.json");
  EXPECT_EQ(sc.run.seed, 3u);
  EXPECT_EQ(sc.run.warmup, 2u);
  EXPECT_EQ(sc.run.federation.strategy, Strategy::NoFederated);
  ASSERT_EQ(sc.nodes.size(), 2u);
  EXPECT_EQ(sc.nodes[0].id, 0u);
  EXPECT_EQ(sc.nodes[1].id, 1u);
  const auto* fs = std::get_if<FileSource>(&sc.nodes[0].source);
  ASSERT_NE(fs, nullptr);
  EXPECT_EQ(fs->path, std::filesystem::path(kData) / "tiny.csv");
  const auto inputs = materialize(sc);
  ASSERT_EQ(inputs.size(), 2u);
  EXPECT_EQ(inputs[0].packets.size(), 5u);
  EXPECT_GT(inputs[1].packets.size(), 50u);
}

TEST(Scenario, DerivedSynthSeedFollowsRunSeed) {
  const std::string base = R"({"seed": SEED, "nodes": [{"window_seconds": 1, "synth": {"duration": 20, "rate": 30}}]})";
  auto with_seed = [&](const char* s) {
    std::string t = base;
    t.replace(t.find("SEED"), 4, s);
    return materialize(parse_scenario(t))[0].packets;
  };
  EXPECT_EQ(with_seed("1").size(), with_seed("1").size());
  EXPECT_NE(with_seed("1")[0].t, with_seed("2")[0].t);
  const auto fixed = R"({"seed": 5, "nodes": [{"window_seconds": 1, "synth": {"duration": 20, "rate": 30, "seed": 9}}]})";
  const auto fixed2 = R"({"seed": 6, "nodes": [{"window_seconds": 1, "synth": {"duration": 20, "rate": 30, "seed": 9}}]})";
  EXPECT_EQ(materialize(parse_scenario(fixed))[0].packets.size(), materialize(parse_scenario(fixed2))[0].packets.size());
}

TEST(Scenario, FullConfigurationBlock) {
  const auto sc = parse_scenario(R"({
    "seed": 11, "warmup": 7, "max_windows": 50, "threads": 2, "trace": true,
    "drnn": {"p": 0.1, "layers": 4},
    "fista": {"l1_coeff": 0.5, "max_iters": 300, "tol": 1e-8, "power_iters": 30},
    "threshold_std": "sample",
    "federation": {"strategy": "acn-l", "c": 0.9, "theta_cap": 0.5, "history_cap": 20},
    "nodes": [{"id": 4, "name": "x", "window_seconds": 2,
               "source": {"path": "/tmp/x.csv", "format": "botiot_csv", "flip": true,
                          "columns": {"time": 3, "length": "len"}, "max_malformed": 0.2}},
              {"window_seconds": 3, "synth": {"duration": 30, "attacks": [{"start": 1, "end": 2}]}}]
  })");
  const auto& r = sc.run;
  EXPECT_EQ(r.seed, 11u);
  EXPECT_EQ(r.max_windows, 50u);
  EXPECT_EQ(r.threads, 2u);
  EXPECT_TRUE(r.trace);
  EXPECT_EQ(r.drnn.p, 0.1);
  EXPECT_EQ(r.drnn.layers, 4u);
  EXPECT_EQ(r.learn.fista.l1_coeff, 0.5);
  EXPECT_EQ(r.learn.fista.max_iters, 300);
  EXPECT_EQ(r.learn.threshold_std, StdConvention::Sample);
  EXPECT_EQ(r.federation.strategy, Strategy::AcnL);
  EXPECT_EQ(r.federation.history_cap, 20u);
  EXPECT_EQ(sc.nodes[0].id, 4u);
  EXPECT_EQ(sc.nodes[1].id, 5u);
  const auto& fs = std::get<FileSource>(sc.nodes[0].source);
  EXPECT_TRUE(fs.options.flip);
  EXPECT_EQ(fs.options.format, DatasetFormat::BotIotCsv);
  EXPECT_EQ(fs.options.columns.time, "3");
  EXPECT_EQ(fs.options.columns.length, "len");
  EXPECT_EQ(fs.options.max_malformed, 0.2);
  const auto& ss = std::get<SynthSource>(sc.nodes[1].source);
  ASSERT_EQ(ss.spec.attacks.size(), 1u);
  EXPECT_EQ(ss.spec.attacks[0].end, 2.0);
}

TEST(Scenario, ConfigJsonRoundTrip) {
  RunConfig c;
  c.seed = 77;
  c.warmup = 9;
  c.learn.fista.tol = 1e-9;
  c.learn.threshold_std = StdConvention::Sample;
  c.federation.strategy = Strategy::Acn;
  c.federation.theta_cap = 0.4;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.warmup, 9u);
  EXPECT_EQ(back.learn.fista.tol, 1e-9);
  EXPECT_EQ(back.learn.threshold_std, StdConvention::Sample);
  EXPECT_EQ(back.federation.strategy, Strategy::Acn);
  EXPECT_EQ(back.federation.theta_cap, 0.4);
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Scenario, Errors) {
  EXPECT_THROW(parse_scenario("{"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"nodes": []})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"nodes": [{"window_seconds": 1}]})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"nodes": [{"synth": {"duration": 5}}]})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"warmup": 0, "nodes": [{"window_seconds": 1, "synth": {"duration": 5}}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario(R"({"federation": {"strategy": "gossip"}, "nodes": [{"window_seconds": 1, "synth": {"duration": 5}}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario(R"({"nodes": [{"window_seconds": 1, "source": {"path": "a", "format": "pcap"}}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario(R"({"nodes": [{"window_seconds": 1, "synth": {"duration": 5, "attacks": [[4, 9]]}}]})"),
               ConfigError);
  EXPECT_THROW(parse_scenario(R"({"threshold_std": "both", "nodes": [{"window_seconds": 1, "synth": {"duration": 5}}]})"),
               ConfigError);
  EXPECT_THROW(load_scenario(kData + "/missing.json"), ConfigError);
  const auto sc = parse_scenario(R"({"nodes": [{"window_seconds": 1, "source": {"path": "/nonexistent/p.csv"}}]})");
  EXPECT_THROW(materialize(sc), DataError);
}

TEST(Scenario, SynthSpecFile) {
  const auto ss = parse_synth_source(R"({"duration": 30, "rate": 20, "seed": 4, "attacks": [[10, 15]]})");
  EXPECT_EQ(ss.duration, 30.0);
  EXPECT_TRUE(ss.explicit_seed);
  EXPECT_EQ(ss.spec.seed, 4u);
  const auto wrapped = parse_synth_source(R"({"synth": {"duration": 10}})");
  EXPECT_EQ(wrapped.duration, 10.0);
  EXPECT_FALSE(wrapped.explicit_seed);
  EXPECT_THROW(parse_synth_source(R"({"rate": 3})"), ConfigError);
}

}  // namespace
}  // namespace dofid
