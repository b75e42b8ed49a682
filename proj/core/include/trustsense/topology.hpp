#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace trustsense {

/// Opaque network-wide node identifier.
struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

/// Euclidean distance.
double distance(Position a, Position b);

enum class NodeRole { Sensor, ClusterHead };

struct Node {
  NodeId id;
  Position position;
  NodeRole role = NodeRole::Sensor;
};

/// A neighbor together with that neighbor's distance to a reference
/// cluster-head (the one the owning sensor routes to).
struct NeighborDistance {
  NodeId id;
  double distanceToHead = 0.0;
};

using DistanceMap = std::vector<NeighborDistance>;

struct TopologyConfig {
  std::size_t sensorCount = 100;
  std::size_t clusterHeadCount = 4;
  double fieldSize = 100.0;
  double radioRange = 20.0;
  /// Per-sensor position redraws allowed before giving up.
  std::size_t maxResamplesPerSensor = 200;
};

/// Raised when generation cannot produce a topology in which every sensor
/// can reach its cluster-head.
class UnconnectableTopology : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnregisteredNode : public std::out_of_range {
 public:
  explicit UnregisteredNode(NodeId id);
};

/// Immutable clustered layout: positions, cluster membership, and the
/// sensor-to-sensor radio graph (strictly closer than radioRange).
/// Cluster-heads are not part of the sensor neighbor graph; a sensor talks
/// to its head directly only when the head is within radioRange.
class NetworkTopology {
 public:
  NetworkTopology(double fieldSize, double radioRange, std::vector<Node> nodes);

  double fieldSize() const { return fieldSize_; }
  double radioRange() const { return radioRange_; }

  /// All nodes in construction order (sensors and heads interleaved as given).
  std::span<const Node> nodes() const { return nodes_; }
  const std::vector<NodeId>& sensors() const { return sensors_; }
  const std::vector<NodeId>& clusterHeads() const { return heads_; }

  bool contains(NodeId id) const { return index_.contains(id.value); }
  bool isClusterHead(NodeId id) const;
  Position position(NodeId id) const;
  std::size_t indexOf(NodeId id) const;

  NodeId clusterOf(NodeId sensor) const;
  /// Sensors assigned to a head, ascending by id.
  const std::vector<NodeId>& members(NodeId head) const;

  /// Sensor neighbors within radioRange, ascending by id.
  const std::vector<NodeId>& neighbors(NodeId sensor) const;
  /// Neighbors in the same cluster with their distance to this sensor's head.
  DistanceMap distanceMap(NodeId sensor) const;

  double distanceToHead(NodeId sensor) const;
  bool headInRange(NodeId sensor) const;
  bool inRange(NodeId a, NodeId b) const;

  friend bool operator==(const NetworkTopology& a, const NetworkTopology& b);

 private:
  const std::vector<NodeId>& adjacency(NodeId id) const;

  double fieldSize_;
  double radioRange_;
  std::vector<Node> nodes_;
  std::vector<NodeId> sensors_;
  std::vector<NodeId> heads_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
  std::vector<NodeId> clusterOf_;              // by node index; heads map to self
  std::vector<std::vector<NodeId>> neighbors_;  // by node index; empty for heads
  std::unordered_map<std::uint32_t, std::vector<NodeId>> members_;
};

/// Uniform sensor placement and a grid of cluster-heads. Sensors that
/// cannot greedily reach their head are redrawn.
NetworkTopology generateTopology(const TopologyConfig& config, std::uint64_t rngSeed);

/// All sensors y != x strictly within radioRange of x.
std::vector<NodeId> spatialNeighbors(const NetworkTopology& topo, NodeId x);

/// True when every sensor either hears its head directly or has a
/// same-cluster neighbor strictly closer to that head.
bool greedilyRoutable(const NetworkTopology& topo, NodeId sensor);

/// `topology v1 <fieldSize> <radioRange>` then `S|H <id> <x> <y>` per node.
/// Reals use shortest round-trip formatting, so parse(write(t)) == t.
void writeTopology(std::ostream& out, const NetworkTopology& topo);
std::string formatTopology(const NetworkTopology& topo);
NetworkTopology parseTopology(std::istream& in);
NetworkTopology parseTopology(const std::string& text);

}  // namespace trustsense

template <>
struct std::hash<trustsense::NodeId> {
  std::size_t operator()(trustsense::NodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
