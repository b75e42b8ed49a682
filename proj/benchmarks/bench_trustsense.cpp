#include <benchmark/benchmark.h>

#include <vector>

#include "trustsense/eigentrust.hpp"
#include "trustsense/engine.hpp"
#include "trustsense/protocol.hpp"
#include "trustsense/rng.hpp"

using namespace trustsense;

static void BM_SelectLink(benchmark::State& state) {
  Rng rng(1);
  std::vector<LinkCandidate> n;
  for (int i = 0; i < state.range(0); ++i) {
    n.push_back({{static_cast<std::uint32_t>(i)}, rng.uniform(0, 20), rng.uniform01()});
  }
  const TrustThresholds t;
  int seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(selectLink(n, 10.0, seed, t));
    seed = (seed + 37) % 101;
  }
}
BENCHMARK(BM_SelectLink)->Arg(4)->Arg(16)->Arg(64);

static void BM_GlobalTrust(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  InteractionLedger ledger;
  std::vector<NodeId> peers;
  for (std::size_t i = 0; i < n; ++i) peers.push_back({static_cast<std::uint32_t>(i)});
  for (std::size_t k = 0; k < n * 8; ++k) {
    ledger.recordSatisfied(peers[rng.below(n)], peers[rng.below(n)]);
  }
  auto c = localTrustMatrix(ledger, peers);
  c.setPreTrustWeight(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(computeGlobalTrust(c, 1e-9, 1000));
}
BENCHMARK(BM_GlobalTrust)->Arg(100)->Arg(400);

static void BM_RunSimulation(benchmark::State& state) {
  RunConfig rc;
  rc.maliciousFraction = 0.3;
  rc.trustModel = state.range(0) == 0 ? TrustModelKind::TrustSense : TrustModelKind::EigenTrust;
  const auto topo = generateTopology(TopologyConfig{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(runSimulation(rc, topo));
}
BENCHMARK(BM_RunSimulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
