#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "trustsense/topology.hpp"

namespace trustsense {

class Rng;

struct TrustThresholds {
  double good = 0.75;
  double medium = 0.25;

  /// Throws std::invalid_argument unless 0 < medium < good < 1.
  void validate() const;
};

struct ProtocolConstants {
  double relayRewardRate = 0.01;
  double consistencyRewardRate = 0.01;
  double packetLossPunishRate = 0.05;
  double outlierPunishRate = 0.05;
  int maxOutlierSequence = 3;
  std::size_t maxClusterSize = 64;
  double outlierThreshold = 2.0;
  double spatialPresenceStep = 0.25;
  int trustUpdatePeriod = 5;
  /// Rounds per data bundling window (consistency checks, presence decay).
  int bundlingWindow = 5;
  TrustThresholds thresholds;

  void validate() const;
};

/// Interpolated starting reputation: 0.25 * good + 0.75 * medium.
double defaultTrust(const TrustThresholds& thresholds);

struct LocalTrustEntry {
  NodeId id;
  double trust = 0.0;
  Position location;
  NodeId ipLink;
  std::set<NodeId> spatialNeighbors;
  int outlierCount = 0;
  std::int64_t lastSequence = -1;
  double lastValue = 0.0;
  double spatialPresence = 1.0;
  bool reportedThisWindow = false;
};

/// What a head published in its most recent local update. Kept so that
/// path estimation can replay link selection with exactly the caches the
/// sensors were routing with.
struct AnnouncedEntry {
  double trust = 0.0;
  Position location;
};

struct TrustUpdate {
  NodeId head;
  std::vector<std::pair<NodeId, double>> entries;
  std::vector<NodeId> blacklist;
  int pathSeed = 0;
};

struct Incident {
  std::uint64_t round = 0;
  NodeId node;
  double expected = 0.0;
  double actual = 0.0;
  double deviation = 0.0;
};

struct HeadCounters {
  std::uint64_t rewards = 0;
  std::uint64_t punishments = 0;
  std::uint64_t blacklisted = 0;
  std::uint64_t removedForAbsence = 0;
  std::uint64_t rejectedRegistrations = 0;
  std::uint64_t unknownPunishTargets = 0;
  std::uint64_t sequenceRegressions = 0;
};

/// Everything a cluster-head knows: its local (cluster) and global
/// (network-wide) trust tables, the blacklist, and the last announcement.
class ClusterHeadState {
 public:
  ClusterHeadState(NodeId id, Position position, double radioRange, ProtocolConstants constants);

  NodeId id() const { return id_; }
  Position position() const { return position_; }
  double radioRange() const { return radioRange_; }
  const ProtocolConstants& constants() const { return constants_; }

  std::map<NodeId, LocalTrustEntry>& localTable() { return local_; }
  const std::map<NodeId, LocalTrustEntry>& localTable() const { return local_; }
  std::map<NodeId, double>& globalTable() { return global_; }
  const std::map<NodeId, double>& globalTable() const { return global_; }
  const std::set<NodeId>& blacklist() const { return blacklist_; }

  LocalTrustEntry* find(NodeId id);
  const LocalTrustEntry* find(NodeId id) const;
  bool isBlacklisted(NodeId id) const { return blacklist_.contains(id); }

  /// Drop a node from both tables and every neighbor set.
  void forget(NodeId id);
  void addToBlacklist(NodeId id);

  int pathSeed() const { return pathSeed_; }
  const std::map<NodeId, AnnouncedEntry>& announced() const { return announced_; }
  void recordAnnouncement(std::map<NodeId, AnnouncedEntry> snapshot, int pathSeed);

  HeadCounters& counters() { return counters_; }
  const HeadCounters& counters() const { return counters_; }
  std::vector<Incident>& incidents() { return incidents_; }
  const std::vector<Incident>& incidents() const { return incidents_; }

 private:
  NodeId id_;
  Position position_;
  double radioRange_;
  ProtocolConstants constants_;
  std::map<NodeId, LocalTrustEntry> local_;
  std::map<NodeId, double> global_;
  std::set<NodeId> blacklist_;
  std::map<NodeId, AnnouncedEntry> announced_;
  int pathSeed_ = 0;
  HeadCounters counters_;
  std::vector<Incident> incidents_;
};

struct RegistrationRequest {
  NodeId id;
  Position location;
  NodeId ipLink;
};

enum class RegistrationOutcome { Registered, AlreadyRegistered, ClusterFull, Blacklisted };

RegistrationOutcome registerNode(ClusterHeadState& head, const RegistrationRequest& request);

struct Broadcast {
  NodeId sender;
  double reach = 0.0;
};

struct FloodResult {
  bool delivered = false;
  /// First route (in breadth-first order) that reached the head, starting
  /// at the new node. Empty when not delivered.
  std::vector<NodeId> route;
  std::vector<Broadcast> broadcasts;
};

/// Directional flood of a registration toward `targetHead`. A neighbor
/// rebroadcasts only if `willForward(neighbor)` and it is strictly closer to
/// the head than the sender; every node handles a given flood at most once.
FloodResult floodRegistration(NodeId newNode, NodeId targetHead, const NetworkTopology& topo,
                              const std::function<bool(NodeId)>& willForward);

enum class TrustBand { High, Medium, Suspect };

/// Band the seed starts searching from: [0,59] high, [60,89] medium,
/// [90,100] suspect. Throws std::invalid_argument outside [0,100].
TrustBand bandForSeed(int seed);
bool inBand(double trust, TrustBand band, const TrustThresholds& thresholds);

struct LinkCandidate {
  NodeId id;
  double distanceToHead = 0.0;
  double trust = 0.0;
};

struct LinkChoice {
  std::optional<NodeId> node;
  /// Band in which the pick was made (meaningless when node is empty).
  TrustBand band = TrustBand::High;
};

/// Seeded trust-banded next-hop choice among neighbors no farther from the
/// head than the selector. Falls through the bands, wrapping to the
/// highest untried one, and picks candidates[seed % size] in input order.
LinkChoice selectLink(std::span<const LinkCandidate> neighbors, double ownDistanceToHead, int seed,
                      const TrustThresholds& thresholds);

/// A sensor's view after local updates: cached neighbor trust, the
/// blacklist, the routing distance map and the current path seed.
struct SensorCache {
  NodeId id;
  NodeId head;
  Position position;
  double distanceToHead = 0.0;
  std::map<NodeId, double> trust;
  std::set<NodeId> blacklist;
  DistanceMap distanceMap;
  int pathSeed = 0;
  bool heardUpdate = false;
};

SensorCache makeSensorCache(const NetworkTopology& topo, NodeId sensor);

/// Keep only entries that concern the sensor's neighbors; rebuild the
/// distance map from them and adopt the new path seed.
void receiveUpdate(SensorCache& cache, const TrustUpdate& update, const NetworkTopology& topo);

LinkChoice selectLink(const SensorCache& cache, const TrustThresholds& thresholds);

/// trust <- min(1, trust + rate). Returns the new trust.
double applyReward(LocalTrustEntry& entry, double rate);

enum class PunishOutcome { Applied, Blacklisted, UnknownNode };

/// trust <- trust - rate; strictly negative trust blacklists the node and
/// removes it from both tables.
PunishOutcome applyPunishment(ClusterHeadState& head, NodeId id, double rate);

/// Heads swap (id, trust) for their own members plus their blacklists. The
/// head whose local table holds an id is authoritative for it; blacklisted
/// ids are purged from every global table.
void globalUpdate(std::span<ClusterHeadState> heads);

/// Build the multicast for a head's cluster with a fresh path seed in
/// [0, 100] and remember it as the head's current announcement.
TrustUpdate localUpdate(ClusterHeadState& head, Rng& rng);

/// End of a bundling window: silent members lose spatialPresenceStep,
/// reporters are reset to 1, members at or below 0 are forgotten (not
/// blacklisted). Clears the per-window report flags. Returns removed ids.
std::vector<NodeId> decaySpatialPresence(ClusterHeadState& head);

}  // namespace trustsense
