#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "trustsense/protocol.hpp"

namespace trustsense {

class Rng;

struct NeighborSample {
  double distance = 0.0;
  double value = 0.0;
};

struct VariogramInput {
  double subjectValue = 0.0;
  std::vector<NeighborSample> neighborSamples;
  double dMax = 1.0;
};

/// Linear-variogram expected value:
///   W_i = d(x,i) / dMax,  E(x) = (sum W_i V(i) + V(x)) / (sum W_i + 1).
/// Throws std::invalid_argument if dMax <= 0 or a distance is outside (0, dMax].
double expectedValue(const VariogramInput& input);

struct OutlierVerdict {
  double expected = 0.0;
  double deviation = 0.0;
  bool isOutlier = false;
};

OutlierVerdict assessOutlier(const VariogramInput& input, double outlierThreshold);

enum class ConsistencyAction {
  Consistent,     // in line with neighbors, no reward drawn
  Rewarded,       // in line, won the 50% reward draw
  OnOffPunished,  // in line right after a short outlier streak
  OutlierCounted,
  IncidentRaised,
};

struct ConsistencyResult {
  OutlierVerdict verdict;
  ConsistencyAction action = ConsistencyAction::Consistent;
  std::optional<PunishOutcome> punishment;
};

/// Spatial check of one member's report against the neighbors that
/// reported in the same bundling window (`windowReports`, id -> value).
/// Throws UnregisteredNode if `id` is not in the head's local table.
ConsistencyResult checkDataConsistency(ClusterHeadState& head, NodeId id, double reportedValue,
                                       const std::map<NodeId, double>& windowReports,
                                       std::uint64_t round, Rng& rng);

struct PathEstimate {
  std::vector<NodeId> nodes;
};

/// Replays link selection from `origin` with `pathSeed`, using the head's
/// last announcement as every hop's cache, until a hop hears the head or no
/// candidate remains. Includes the origin.
PathEstimate estimatePath(const ClusterHeadState& head, NodeId origin, int pathSeed);

enum class SequenceAction { Recorded, InOrder, Rewarded, Punished };

struct SequenceInspection {
  std::int64_t gap = 0;
  bool inspected = false;
  SequenceAction action = SequenceAction::Recorded;
  PathEstimate path;
};

/// Packet-loss inspection for a data packet from a registered member. The
/// inspection itself happens with probability 1/2; the cached sequence is
/// advanced on every call. A gap other than one punishes the estimated path
/// (packetLossPunishRate split equally); an in-order packet rewards it
/// (relayRewardRate split equally) with probability 1/2.
SequenceInspection inspectSequence(ClusterHeadState& head, NodeId origin, std::int64_t sequence,
                                   int pathSeed, Rng& rng);

}  // namespace trustsense
