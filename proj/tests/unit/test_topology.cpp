#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trustsense/topology.hpp"

using namespace trustsense;

namespace {

NetworkTopology lineTopology() {
  // s0 -- s1 -- s2 -- H9 along the x axis, 15 apart, range 20.
  return NetworkTopology(100.0, 20.0,
                         {{{0}, {10, 50}, NodeRole::Sensor},
                          {{1}, {25, 50}, NodeRole::Sensor},
                          {{2}, {40, 50}, NodeRole::Sensor},
                          {{9}, {55, 50}, NodeRole::ClusterHead}});
}

}  // namespace

TEST(Topology, SameSeedSameBytes) {
  TopologyConfig cfg;
  EXPECT_EQ(formatTopology(generateTopology(cfg, 42)), formatTopology(generateTopology(cfg, 42)));
  EXPECT_NE(formatTopology(generateTopology(cfg, 42)), formatTopology(generateTopology(cfg, 43)));
}

TEST(Topology, TextRoundTripIsBitExact) {
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const auto t = generateTopology(TopologyConfig{}, seed);
    const auto text = formatTopology(t);
    const auto back = parseTopology(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(formatTopology(back), text);
    for (const auto& n : t.nodes()) {
      EXPECT_EQ(back.position(n.id).x, n.position.x);
      EXPECT_EQ(back.position(n.id).y, n.position.y);
    }
  }
}

TEST(Topology, HeaderAndLineFormat) {
  const auto text = formatTopology(lineTopology());
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "topology v1 100 20");
  std::getline(in, line);
  EXPECT_EQ(line, "S 0 10 50");
}

TEST(Topology, ParseRejectsGarbage) {
  EXPECT_THROW(parseTopology(std::string("topology v2 100 20\n")), std::exception);
  EXPECT_THROW(parseTopology(std::string("topology v1 100 20\nX 1 2 3\n")), std::exception);
}

TEST(Topology, ClusterAssignmentMatchesBruteForceNearestHead) {
  const auto t = generateTopology(TopologyConfig{}, 5);
  for (auto s : t.sensors()) {
    NodeId best = t.clusterHeads().front();
    double bestD = INFINITY;
    for (auto h : t.clusterHeads()) {
      const double d = std::hypot(t.position(s).x - t.position(h).x, t.position(s).y - t.position(h).y);
      if (d < bestD) {
        bestD = d;
        best = h;
      }
    }
    EXPECT_EQ(t.clusterOf(s), best) << s.value;
    EXPECT_DOUBLE_EQ(t.distanceToHead(s), bestD);
  }
}

TEST(Topology, NeighborsMatchQuadraticFilter) {
  const auto t = generateTopology(TopologyConfig{}, 11);
  for (auto a : t.sensors()) {
    std::vector<NodeId> expected;
    for (auto b : t.sensors()) {
      if (a == b) continue;
      const double dx = t.position(a).x - t.position(b).x;
      const double dy = t.position(a).y - t.position(b).y;
      if (std::sqrt(dx * dx + dy * dy) < t.radioRange()) expected.push_back(b);
    }
    EXPECT_EQ(t.neighbors(a), expected);
    EXPECT_EQ(spatialNeighbors(t, a), expected);
  }
}

TEST(Topology, NeighborRelationIsSymmetric) {
  const auto t = generateTopology(TopologyConfig{}, 3);
  for (auto a : t.sensors()) {
    for (auto b : t.neighbors(a)) {
      const auto& back = t.neighbors(b);
      EXPECT_TRUE(std::find(back.begin(), back.end(), a) != back.end());
    }
  }
}

TEST(Topology, GeneratedNetworksAreGreedilyRoutable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = generateTopology(TopologyConfig{}, seed);
    ASSERT_EQ(t.sensors().size(), 100u);
    ASSERT_EQ(t.clusterHeads().size(), 4u);
    for (auto s : t.sensors()) {
      EXPECT_TRUE(greedilyRoutable(t, s));
      const auto p = t.position(s);
      EXPECT_GE(p.x, 0.0);
      EXPECT_LE(p.x, 100.0);
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.y, 100.0);
    }
  }
}

TEST(Topology, SensorsAndHeadsAreDisjoint) {
  const auto t = generateTopology(TopologyConfig{}, 8);
  for (auto h : t.clusterHeads()) {
    EXPECT_TRUE(t.isClusterHead(h));
    EXPECT_TRUE(std::find(t.sensors().begin(), t.sensors().end(), h) == t.sensors().end());
    EXPECT_TRUE(spatialNeighbors(t, h).empty());
  }
}

TEST(Topology, DistanceMapOnLine) {
  const auto t = lineTopology();
  const auto dm = t.distanceMap(NodeId{1});
  ASSERT_EQ(dm.size(), 2u);
  EXPECT_EQ(dm[0].id, NodeId{0});
  EXPECT_DOUBLE_EQ(dm[0].distanceToHead, 45.0);
  EXPECT_EQ(dm[1].id, NodeId{2});
  EXPECT_DOUBLE_EQ(dm[1].distanceToHead, 15.0);
  EXPECT_TRUE(t.headInRange(NodeId{2}));
  EXPECT_FALSE(t.headInRange(NodeId{1}));
}

TEST(Topology, UnknownIdThrows) {
  const auto t = lineTopology();
  EXPECT_THROW(spatialNeighbors(t, NodeId{77}), UnregisteredNode);
}

TEST(Topology, ConstructorValidates) {
  EXPECT_THROW(NetworkTopology(10, 5, {{{0}, {1, 1}, NodeRole::Sensor}}), std::invalid_argument);
  EXPECT_THROW(NetworkTopology(10, 5, {{{0}, {11, 1}, NodeRole::Sensor}, {{1}, {5, 5}, NodeRole::ClusterHead}}),
               std::invalid_argument);
  EXPECT_THROW(NetworkTopology(10, 5, {{{0}, {1, 1}, NodeRole::Sensor}, {{0}, {5, 5}, NodeRole::ClusterHead}}),
               std::invalid_argument);
}

TEST(Topology, ImpossibleRangeIsUnconnectable) {
  TopologyConfig cfg;
  cfg.sensorCount = 30;
  cfg.radioRange = 0.5;
  cfg.maxResamplesPerSensor = 3;
  EXPECT_THROW(generateTopology(cfg, 1), UnconnectableTopology);
}
