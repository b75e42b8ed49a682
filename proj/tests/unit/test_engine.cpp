#include <gtest/gtest.h>

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "trustsense/detection.hpp"
#include "trustsense/engine.hpp"
#include "trustsense/models.hpp"
#include "trustsense/rng.hpp"

using namespace trustsense;

namespace {

RunConfig smallConfig(double fraction, TrustModelKind model = TrustModelKind::TrustSense) {
  RunConfig c;
  c.sensorCount = 50;
  c.clusterHeadCount = 4;
  c.maliciousFraction = fraction;
  c.rounds = 60;
  c.rngSeed = 3;
  c.trustModel = model;
  return c;
}

NetworkTopology smallTopology(std::uint64_t seed = 3) {
  TopologyConfig t;
  t.sensorCount = 50;
  t.clusterHeadCount = 4;
  return generateTopology(t, seed);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<NodeId> parsePath(const std::string& s) {
  std::vector<NodeId> out;
  std::size_t at = 0;
  while (at < s.size()) {
    auto next = s.find('>', at);
    if (next == std::string::npos) next = s.size();
    out.push_back({static_cast<std::uint32_t>(std::stoul(s.substr(at, next - at)))});
    at = next + 1;
  }
  return out;
}

struct HopRecorder : RunObserver {
  const NetworkTopology* topo = nullptr;
  std::size_t hops = 0;
  std::size_t nonCloserHops = 0;
  void onDataPacket(std::uint64_t, const Packet& p, bool) override {
    for (std::size_t i = 1; i < p.pathTrace.size(); ++i) {
      ++hops;
      const auto from = p.pathTrace[i - 1];
      const auto to = p.pathTrace[i];
      if (topo->isClusterHead(to)) continue;
      if (!(topo->distanceToHead(to) <= topo->distanceToHead(from))) ++nonCloserHops;
    }
  }
};

}  // namespace

TEST(Energy, LedgerAndHop) {
  const NetworkTopology t(100, 20,
                          {{{0}, {10, 50}, NodeRole::Sensor},
                           {{1}, {22, 50}, NodeRole::Sensor},
                           {{9}, {40, 50}, NodeRole::ClusterHead}});
  EnergyLedger ledger;
  auto p = makeDataPacket({0}, 0, 1.0);
  p = deliverHop(std::move(p), {0}, {1}, t, ledger, 2.0);
  EXPECT_DOUBLE_EQ(ledger.of({0}), 24.0);
  EXPECT_EQ(p.hopCount, 1u);
  p = deliverHop(std::move(p), {1}, {9}, t, ledger, 2.0);
  EXPECT_DOUBLE_EQ(ledger.total(), 24.0 + 36.0);
  EXPECT_EQ(p.pathTrace, (std::vector<NodeId>{{0}, {1}, {9}}));
  EXPECT_THROW(deliverHop(makeDataPacket({0}, 0, 0), {0}, {9}, t, ledger, 1.0), std::invalid_argument);
  EXPECT_THROW(deliverHop(makeDataPacket({0}, 0, 0), {0}, {0}, t, ledger, 1.0), std::invalid_argument);
  EXPECT_THROW(ledger.charge({0}, -1), std::invalid_argument);
}

TEST(Energy, MulticastChargedOnce) {
  EnergyLedger ledger;
  const std::vector<NodeId> to{{1}, {2}, {3}};
  int got = 0;
  EXPECT_EQ(multicastFromHead({9}, TrustUpdate{}, to, ledger, 1.5, [&](NodeId, const TrustUpdate&) { ++got; }), 3u);
  EXPECT_EQ(got, 3);
  EXPECT_EQ(ledger.total(), 1.5);
}

TEST(Clock, UpdateRounds) {
  SimClock c{0, 5};
  EXPECT_TRUE(c.isUpdateRound());
  c.round = 4;
  EXPECT_FALSE(c.isUpdateRound());
  c.round = 10;
  EXPECT_TRUE(c.isUpdateRound());
}

TEST(Run, ConfigValidation) {
  auto c = smallConfig(0.0);
  const auto t = smallTopology();
  c.sensorCount = 51;
  EXPECT_THROW(runSimulation(c, t), std::invalid_argument);
  c = smallConfig(1.0);
  EXPECT_THROW(runSimulation(c, t), std::invalid_argument);
  c = smallConfig(0.0);
  c.rounds = 0;
  EXPECT_THROW(runSimulation(c, t), std::invalid_argument);
}

TEST(Run, DeterministicInConfigAndTopology) {
  const auto t = smallTopology();
  for (auto model : {TrustModelKind::TrustSense, TrustModelKind::EigenTrust}) {
    const auto c = smallConfig(0.3, model);
    EXPECT_EQ(runSimulation(c, t), runSimulation(c, t));
  }
}

TEST(Run, BenignNetworkIsClean) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto t = smallTopology(seed);
    auto c = smallConfig(0.0);
    c.rngSeed = seed;
    HopRecorder rec;
    rec.topo = &t;
    const auto m = runSimulation(c, t, &rec);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.punishments, 0u);
    EXPECT_EQ(m.blacklistFalsePositives + m.blacklistTruePositives, 0u);
    EXPECT_EQ(m.benevolentPackets, 50u * 60u);
    EXPECT_GT(rec.hops, 0u);
    EXPECT_EQ(rec.nonCloserHops, 0u);
  }
}

TEST(Run, EventLogRecountsMetrics) {
  // Oracle: recompute energy, accuracy and path length from the log text.
  for (auto model : {TrustModelKind::TrustSense, TrustModelKind::EigenTrust}) {
    const auto t = smallTopology();
    auto c = smallConfig(0.3, model);
    c.energyPerUnitDistance = 0.5;
    std::ostringstream log;
    EventLogWriter writer(log, true, true);
    const auto m = runSimulation(c, t, &writer);

    std::istringstream in(log.str());
    std::string line;
    std::getline(in, line);
    ASSERT_EQ(line, "round,kind,origin,path,delivered,value");
    double energy = 0;
    std::uint64_t benign = 0, intact = 0, deliveries = 0, hops = 0;
    std::map<std::uint64_t, std::set<std::uint32_t>> bad;
    while (std::getline(in, line)) {
      const auto f = split(line);
      ASSERT_EQ(f.size(), 6u) << line;
      const auto round = std::stoull(f[0]);
      const auto origin = static_cast<std::uint32_t>(std::stoul(f[2]));
      if (f[1] == "malicious") {
        bad[round].insert(origin);
      } else if (f[1] == "data") {
        const auto path = parsePath(f[3]);
        for (std::size_t i = 1; i < path.size(); ++i) {
          energy += 0.5 * distance(t.position(path[i - 1]), t.position(path[i]));
        }
        const bool delivered = f[4] == "1";
        if (delivered) {
          ++deliveries;
          hops += path.size() - 1;
        }
        if (!bad[round].contains(origin)) {
          ++benign;
          const double truth = c.field.valueAt(t.position({origin}));
          if (delivered && std::strtod(f[5].c_str(), nullptr) == truth) ++intact;
        }
      } else if (f[1].ends_with("-tx")) {
        energy += 0.5 * std::strtod(f[5].c_str(), nullptr);
      }
    }
    EXPECT_NEAR(energy, m.energy, 1e-6 * m.energy);
    EXPECT_EQ(benign, m.benevolentPackets);
    EXPECT_EQ(intact, m.benevolentDelivered);
    EXPECT_DOUBLE_EQ(static_cast<double>(intact) / benign, m.accuracy);
    EXPECT_EQ(deliveries, m.deliveries);
    EXPECT_DOUBLE_EQ(static_cast<double>(hops) / deliveries, m.avgPathLength);
  }
}

TEST(Run, FullDroppersWithholdOwnReadings) {
  const auto t = smallTopology();
  auto c = smallConfig(0.3);
  c.adversary.dropMode = DropMode::Full;
  struct Count : RunObserver {
    std::set<NodeId> bad;
    std::size_t own = 0, sent = 0;
    void onRoundStart(std::uint64_t, const AdversaryState& a) override {
      const auto m = a.malicious();
      bad = {m.begin(), m.end()};
    }
    void onDataPacket(std::uint64_t, const Packet& p, bool) override {
      if (!bad.contains(p.origin)) return;
      ++own;
      sent += p.pathTrace.size() > 1;
    }
  } obs;
  runSimulation(c, t, &obs);
  EXPECT_GT(obs.own, 0u);
  EXPECT_EQ(obs.sent, 0u);

  c.adversary.dropOwnPackets = false;
  Count obs2;
  runSimulation(c, t, &obs2);
  EXPECT_GT(obs2.sent, 0u);
}

TEST(Run, TrustSenseDetectsStaticAdversaries) {
  const auto t = smallTopology();
  auto c = smallConfig(0.3);
  c.rounds = 150;
  const auto m = runSimulation(c, t);
  EXPECT_GE(m.blacklistTruePositives, 10u);
  EXPECT_LE(m.blacklistFalsePositives, 1u);
}

TEST(Run, FloodQueriesCostMoreThanHeadQueries) {
  const auto t = smallTopology();
  auto c = smallConfig(0.2, TrustModelKind::EigenTrust);
  const auto flood = runSimulation(c, t);
  c.eigentrust.queryModel = QueryModel::Head;
  const auto head = runSimulation(c, t);
  EXPECT_GT(flood.energy, head.energy);
  EXPECT_EQ(flood.deliveries, head.deliveries);
}

TEST(Model, HeadEstimateMatchesActualRouteOnBenignNetwork) {
  const auto t = smallTopology(7);
  auto c = smallConfig(0.0);
  const AdversaryState adversary(t, assignAdversaries(t, 0.0, 1), c.adversary);
  EnergyLedger se, he;
  Rng pr(1, 2), ar(1, 1);
  SimContext ctx(t, c, adversary, se, he, pr, ar, nullptr);
  TrustSenseModel model(t, c);
  for (std::uint64_t round : {0u, 5u, 10u}) {
    ctx.setRound(round);
    model.beginRound(ctx);
    for (auto s : t.sensors()) {
      ASSERT_TRUE(model.isRegistered(s));
      std::vector<NodeId> actual{s};
      NodeId at = s;
      auto packet = makeDataPacket(s, 0, 0);
      while (!t.headInRange(at)) {
        const auto next = model.nextHop(ctx, at, packet);
        ASSERT_TRUE(next.has_value());
        actual.push_back(*next);
        at = *next;
      }
      const auto& head = model.head(t.clusterOf(s));
      EXPECT_EQ(estimatePath(head, s, head.pathSeed()).nodes, actual) << s.value;
    }
  }
}

TEST(Model, NamesAndFactory) {
  const auto t = smallTopology();
  EXPECT_EQ(makeTrustModel(t, smallConfig(0))->name(), "trustsense");
  EXPECT_EQ(makeTrustModel(t, smallConfig(0, TrustModelKind::EigenTrust))->name(), "eigentrust");
  EXPECT_EQ(toString(QueryModel::Flood), "flood");
  EXPECT_EQ(toString(AdversaryMode::Oscillating), "oscillating");
}
