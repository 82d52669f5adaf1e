#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "dofid/federation.hpp"
#include "dofid/learning.hpp"
#include "dofid/orchestrator.hpp"

namespace {

using namespace dofid;

const DrnnParams kParams{};

Matrix uniform(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

std::vector<RandomProjection> projections() {
  std::vector<RandomProjection> p;
  for (std::size_t h = 0; h + 1 < kParams.layers; ++h) p.push_back(RandomProjection::from_seed(11 + h, kParams.width));
  return p;
}

TrainSet train_set(Eigen::Index rows) {
  std::mt19937_64 rng(1);
  TrainSet ts;
  ts.X = uniform(rng, rows, 3) * 0.5;
  ts.window_ids.resize(static_cast<std::size_t>(rows));
  return ts;
}

IdsModel trained(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrainSet ts;
  ts.X = uniform(rng, 60, 3) * 0.5;
  return *local_learn(ts, kParams, LearnConfig{}, projections());
}

void BM_Psi(benchmark::State& state) {
  double L = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi(L, kParams));
    L += 1e-6;
  }
}
BENCHMARK(BM_Psi);

void BM_Forward(benchmark::State& state) {
  const auto m = trained(2);
  const Vec3 x{0.2, 0.3, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(drnn_forward(x, m, kParams));
}
BENCHMARK(BM_Forward);

void BM_LocalLearn(benchmark::State& state) {
  const auto ts = train_set(state.range(0));
  const auto proj = projections();
  for (auto _ : state) benchmark::DoNotOptimize(local_learn(ts, kParams, LearnConfig{}, proj));
}
BENCHMARK(BM_LocalLearn)->Arg(30)->Arg(100)->Arg(330);

struct Fixture {
  IdsModel local = trained(3);
  std::vector<PeerSnapshot> peers{{1, std::make_shared<const IdsModel>(trained(4))},
                                  {2, std::make_shared<const IdsModel>(trained(5))}};
  std::vector<PeerSnapshot> everyone{{0, std::make_shared<const IdsModel>(local)}, peers[0], peers[1]};
};

void BM_DfuMerge(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) benchmark::DoNotOptimize(dfu_merge(f.local, f.peers, 0.75));
}
BENCHMARK(BM_DfuMerge);

void BM_ConcurrenceSelection(benchmark::State& state) {
  Fixture f;
  std::mt19937_64 rng(6);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Vec3> x(n);
  std::vector<std::uint8_t> y(n, 0);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (auto& v : x) v = {u(rng), u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(select_concurring(x, y, f.peers, kParams, 0.65));
}
BENCHMARK(BM_ConcurrenceSelection)->Arg(100)->Arg(330);

void BM_AverageMerge(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) benchmark::DoNotOptimize(average_merge(f.local, f.everyone));
}
BENCHMARK(BM_AverageMerge);

void BM_AcnUpdate(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) benchmark::DoNotOptimize(acn_update(f.local, f.peers));
}
BENCHMARK(BM_AcnUpdate);

void BM_AcnLUpdate(benchmark::State& state) {
  Fixture f;
  for (auto _ : state) benchmark::DoNotOptimize(acnl_update(f.local, f.peers));
}
BENCHMARK(BM_AcnLUpdate);

void BM_Refit(benchmark::State& state) {
  Fixture f;
  const auto ts = train_set(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(refit_output(f.local, ts, kParams));
}
BENCHMARK(BM_Refit)->Arg(100)->Arg(330);

}  // namespace
BENCHMARK_MAIN();
