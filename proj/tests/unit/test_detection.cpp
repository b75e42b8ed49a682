#include <gtest/gtest.h>

#include "trustsense/detection.hpp"
#include "trustsense/rng.hpp"

using namespace trustsense;

namespace {

// Members 0..3 along y = 50 at x = 10, 25, 40, 55; head at x = 70, range 20.
ClusterHeadState chain() {
  ClusterHeadState h({100}, {70, 50}, 20.0, ProtocolConstants{});
  for (std::uint32_t i = 0; i < 4; ++i) {
    registerNode(h, {{i}, {10.0 + 15.0 * i, 50}, {100}});
  }
  return h;
}

double oracleExpected(double v, const std::vector<std::pair<double, double>>& samples, double dMax) {
  double num = v, den = 1.0;
  for (auto [d, x] : samples) {
    num += d / dMax * x;
    den += d / dMax;
  }
  return num / den;
}

}  // namespace

TEST(Variogram, WorkedExample) {
  VariogramInput in{10.0, {{10.0, 20.0}, {20.0, 30.0}}, 20.0};
  // (10 + 0.5*20 + 1*30) / (1 + 0.5 + 1) = 50 / 2.5
  EXPECT_DOUBLE_EQ(expectedValue(in), 20.0);
  const auto v = assessOutlier(in, 2.0);
  EXPECT_DOUBLE_EQ(v.deviation, 10.0);
  EXPECT_TRUE(v.isOutlier);
}

TEST(Variogram, NoNeighborsMeansOwnValue) {
  const auto v = assessOutlier({7.5, {}, 20.0}, 2.0);
  EXPECT_EQ(v.expected, 7.5);
  EXPECT_EQ(v.deviation, 0.0);
  EXPECT_FALSE(v.isOutlier);
}

TEST(Variogram, ThresholdIsStrict) {
  // One neighbor at dMax: E = (v + x) / 2, deviation = |x - v| / 2.
  EXPECT_FALSE(assessOutlier({0.0, {{20.0, 4.0}}, 20.0}, 2.0).isOutlier);
  EXPECT_TRUE(assessOutlier({0.0, {{20.0, 4.0001}}, 20.0}, 2.0).isOutlier);
}

TEST(Variogram, RandomInputsMatchOracle) {
  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    VariogramInput in;
    in.dMax = rng.uniform(1, 50);
    in.subjectValue = rng.uniform(-100, 100);
    std::vector<std::pair<double, double>> samples;
    for (int i = 0, n = static_cast<int>(rng.between(0, 8)); i < n; ++i) {
      const double d = in.dMax * (1.0 - rng.uniform01());
      const double x = rng.uniform(-100, 100);
      samples.emplace_back(d, x);
      in.neighborSamples.push_back({d, x});
    }
    EXPECT_NEAR(expectedValue(in), oracleExpected(in.subjectValue, samples, in.dMax), 1e-12);
  }
}

TEST(Variogram, RejectsBadDistances) {
  EXPECT_THROW(expectedValue({1, {}, 0.0}), std::invalid_argument);
  EXPECT_THROW(expectedValue({1, {{0.0, 1}}, 10.0}), std::invalid_argument);
  EXPECT_THROW(expectedValue({1, {{10.5, 1}}, 10.0}), std::invalid_argument);
}

TEST(Consistency, UnknownNodeThrows) {
  auto h = chain();
  Rng rng(1);
  EXPECT_THROW(checkDataConsistency(h, {42}, 1.0, {}, 0, rng), UnregisteredNode);
}

TEST(Consistency, ShortOutlierStreakIsPunishedOnRecovery) {
  auto h = chain();
  Rng rng(1);
  const std::map<NodeId, double> bad{{{0}, 20.0}, {{1}, 50.0}, {{2}, 20.0}};
  const std::map<NodeId, double> good{{{0}, 20.0}, {{1}, 20.0}, {{2}, 20.0}};
  const double before = h.find({1})->trust;
  EXPECT_EQ(checkDataConsistency(h, {1}, 50.0, bad, 0, rng).action, ConsistencyAction::OutlierCounted);
  EXPECT_EQ(h.find({1})->outlierCount, 1);
  EXPECT_EQ(h.find({1})->trust, before);
  const auto r = checkDataConsistency(h, {1}, 20.0, good, 1, rng);
  EXPECT_EQ(r.action, ConsistencyAction::OnOffPunished);
  EXPECT_EQ(r.punishment, PunishOutcome::Applied);
  EXPECT_DOUBLE_EQ(h.find({1})->trust, before - 0.05);
  EXPECT_EQ(h.find({1})->outlierCount, 0);
}

TEST(Consistency, LongStreakRaisesIncidentWithoutPunishment) {
  auto h = chain();
  Rng rng(1);
  const std::map<NodeId, double> bad{{{0}, 20.0}, {{1}, 50.0}, {{2}, 20.0}};
  const double before = h.find({1})->trust;
  EXPECT_EQ(checkDataConsistency(h, {1}, 50.0, bad, 0, rng).action, ConsistencyAction::OutlierCounted);
  EXPECT_EQ(checkDataConsistency(h, {1}, 50.0, bad, 1, rng).action, ConsistencyAction::OutlierCounted);
  const auto r = checkDataConsistency(h, {1}, 50.0, bad, 2, rng);
  EXPECT_EQ(r.action, ConsistencyAction::IncidentRaised);
  EXPECT_FALSE(r.punishment.has_value());
  EXPECT_EQ(h.find({1})->trust, before);
  EXPECT_EQ(h.find({1})->outlierCount, 0);
  ASSERT_EQ(h.incidents().size(), 1u);
  EXPECT_EQ(h.incidents()[0].round, 2u);
  EXPECT_EQ(h.incidents()[0].node, NodeId{1});
  EXPECT_EQ(h.incidents()[0].actual, 50.0);
  // Neighbors 0 and 2 are both 15 away: E = (50 + 0.75*20*2) / 2.5 = 32.
  EXPECT_DOUBLE_EQ(h.incidents()[0].expected, 32.0);
  EXPECT_DOUBLE_EQ(h.incidents()[0].deviation, 18.0);
}

TEST(Consistency, OnlyWindowReportersCount) {
  auto h = chain();
  Rng rng(1);
  // Neighbors silent this window: nothing to compare against.
  const auto r = checkDataConsistency(h, {1}, 500.0, {{{1}, 500.0}}, 0, rng);
  EXPECT_FALSE(r.verdict.isOutlier);
}

TEST(Consistency, RewardDrawIsFair) {
  auto h = chain();
  Rng rng(3);
  const std::map<NodeId, double> good{{{0}, 20.0}, {{1}, 20.0}, {{2}, 20.0}};
  int rewarded = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    h.find({1})->trust = 0.5;
    if (checkDataConsistency(h, {1}, 20.0, good, 0, rng).action != ConsistencyAction::Rewarded) continue;
    ++rewarded;
    ASSERT_DOUBLE_EQ(h.find({1})->trust, 0.51);
    ASSERT_EQ(h.globalTable().at({1}), h.find({1})->trust);
  }
  EXPECT_NEAR(rewarded / double(trials), 0.5, 0.02);
}

TEST(EstimatePath, FollowsChainToHead) {
  auto h = chain();
  Rng rng(1);
  localUpdate(h, rng);
  for (int seed : {0, 50, 70, 95}) {
    EXPECT_EQ(estimatePath(h, {0}, seed).nodes, (std::vector<NodeId>{{0}, {1}, {2}, {3}}));
  }
  EXPECT_EQ(estimatePath(h, {3}, 0).nodes, (std::vector<NodeId>{{3}}));
}

TEST(EstimatePath, StopsWhenNoCandidate) {
  auto h = chain();
  h.find({1})->trust = 0.0;
  applyPunishment(h, {1}, 0.1);
  Rng rng(1);
  localUpdate(h, rng);
  EXPECT_EQ(estimatePath(h, {0}, 0).nodes, (std::vector<NodeId>{{0}}));
}

TEST(Sequence, FirstPacketSetsBaseline) {
  auto h = chain();
  Rng rng(1);
  const auto r = inspectSequence(h, {0}, 5, 0, rng);
  EXPECT_FALSE(r.inspected);
  EXPECT_EQ(h.find({0})->lastSequence, 5);
}

TEST(Sequence, GapPunishesEstimatedPathEqually) {
  // Find an rng draw that inspects, then check the arithmetic.
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto h = chain();
    Rng rng(1);
    localUpdate(h, rng);
    for (auto& [id, e] : h.localTable()) e.trust = 0.5;
    Rng draw(s);
    inspectSequence(h, {0}, 0, 0, draw);
    const auto r = inspectSequence(h, {0}, 3, 0, draw);
    EXPECT_EQ(r.gap, 3);
    if (!r.inspected) continue;
    EXPECT_EQ(r.action, SequenceAction::Punished);
    ASSERT_EQ(r.path.nodes.size(), 4u);
    for (auto n : r.path.nodes) EXPECT_DOUBLE_EQ(h.find(n)->trust, 0.5 - 0.05 / 4);
    return;
  }
  FAIL() << "no inspection in 50 seeds";
}

TEST(Sequence, InOrderRewardSplitsRelayRate) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto h = chain();
    Rng rng(1);
    localUpdate(h, rng);
    for (auto& [id, e] : h.localTable()) e.trust = 0.5;
    Rng draw(s);
    inspectSequence(h, {0}, 0, 0, draw);
    const auto r = inspectSequence(h, {0}, 1, 0, draw);
    if (r.action != SequenceAction::Rewarded) continue;
    for (auto n : r.path.nodes) {
      EXPECT_DOUBLE_EQ(h.find(n)->trust, 0.5 + 0.01 / 4);
      EXPECT_EQ(h.globalTable().at(n), h.find(n)->trust);
    }
    return;
  }
  FAIL() << "no reward in 100 seeds";
}

TEST(Sequence, InspectionRateIsHalf) {
  auto h = chain();
  Rng rng(11);
  localUpdate(h, rng);
  int inspected = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    h.find({3})->lastSequence = i;
    inspected += inspectSequence(h, {3}, i + 1, 0, rng).inspected;
  }
  EXPECT_NEAR(inspected / double(trials), 0.5, 0.02);
}

TEST(Sequence, RegressionCounted) {
  auto h = chain();
  Rng rng(1);
  inspectSequence(h, {0}, 10, 0, rng);
  inspectSequence(h, {0}, 9, 0, rng);
  EXPECT_EQ(h.counters().sequenceRegressions, 1u);
}
