#include "trustsense/detection.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "trustsense/rng.hpp"

namespace trustsense {

double expectedValue(const VariogramInput& input) {
  if (!(input.dMax > 0.0)) throw std::invalid_argument("variogram: dMax must be positive");
  double weighted = input.subjectValue;
  double weights = 1.0;
  for (const auto& s : input.neighborSamples) {
    if (!(s.distance > 0.0) || s.distance > input.dMax) {
      throw std::invalid_argument("variogram: neighbor distance outside (0, dMax]");
    }
    const double w = s.distance / input.dMax;
    weighted += w * s.value;
    weights += w;
  }
  return weighted / weights;
}

OutlierVerdict assessOutlier(const VariogramInput& input, double outlierThreshold) {
  OutlierVerdict v;
  v.expected = expectedValue(input);
  v.deviation = std::abs(v.expected - input.subjectValue);
  v.isOutlier = v.deviation > outlierThreshold;
  return v;
}

ConsistencyResult checkDataConsistency(ClusterHeadState& head, NodeId id, double reportedValue,
                                       const std::map<NodeId, double>& windowReports,
                                       std::uint64_t round, Rng& rng) {
  auto* entry = head.find(id);
  if (entry == nullptr) throw UnregisteredNode(id);
  const auto& k = head.constants();

  VariogramInput input;
  input.subjectValue = reportedValue;
  input.dMax = head.radioRange();
  for (auto n : entry->spatialNeighbors) {
    auto report = windowReports.find(n);
    if (report == windowReports.end()) continue;
    const auto* neighbor = head.find(n);
    if (neighbor == nullptr) continue;
    const double d = distance(entry->location, neighbor->location);
    if (d <= 0.0) continue;  // co-located sensors carry no spatial information
    input.neighborSamples.push_back({d, report->second});
  }

  ConsistencyResult result;
  result.verdict = assessOutlier(input, k.outlierThreshold);

  if (!result.verdict.isOutlier) {
    if (entry->outlierCount > 0 && entry->outlierCount < k.maxOutlierSequence) {
      entry->outlierCount = 0;
      result.action = ConsistencyAction::OnOffPunished;
      result.punishment = applyPunishment(head, id, k.outlierPunishRate);
      return result;
    }
    entry->outlierCount = 0;
    if (rng.bernoulli(0.5)) {
      applyReward(*entry, k.consistencyRewardRate);
      head.globalTable()[id] = entry->trust;
      ++head.counters().rewards;
      result.action = ConsistencyAction::Rewarded;
    }
    return result;
  }

  if (++entry->outlierCount >= k.maxOutlierSequence) {
    entry->outlierCount = 0;
    head.incidents().push_back(
        {round, id, result.verdict.expected, reportedValue, result.verdict.deviation});
    result.action = ConsistencyAction::IncidentRaised;
  } else {
    result.action = ConsistencyAction::OutlierCounted;
  }
  return result;
}

PathEstimate estimatePath(const ClusterHeadState& head, NodeId origin, int pathSeed) {
  const auto* originEntry = head.find(origin);
  if (originEntry == nullptr) throw UnregisteredNode(origin);

  const auto& announced = head.announced();
  const double range = head.radioRange();
  const Position hp = head.position();
  auto locationOf = [&](NodeId id) {
    if (auto it = announced.find(id); it != announced.end()) return it->second.location;
    return head.find(id)->location;
  };

  PathEstimate path;
  std::set<NodeId> visited;
  NodeId at = origin;
  while (true) {
    path.nodes.push_back(at);
    visited.insert(at);
    const Position here = locationOf(at);
    const double own = distance(here, hp);
    if (own < range) break;

    std::vector<LinkCandidate> candidates;
    for (const auto& [id, e] : announced) {
      if (id == at || distance(here, e.location) >= range) continue;
      candidates.push_back({id, distance(e.location, hp), e.trust});
    }
    const auto choice = selectLink(candidates, own, pathSeed, head.constants().thresholds);
    if (!choice.node || visited.contains(*choice.node)) break;
    at = *choice.node;
  }
  return path;
}

SequenceInspection inspectSequence(ClusterHeadState& head, NodeId origin, std::int64_t sequence,
                                   int pathSeed, Rng& rng) {
  auto* entry = head.find(origin);
  if (entry == nullptr) throw UnregisteredNode(origin);
  const auto& k = head.constants();

  SequenceInspection out;
  const std::int64_t cached = entry->lastSequence;
  entry->lastSequence = sequence;
  // Nothing cached yet: the first packet after (re-)registration sets the baseline.
  if (cached < 0) return out;

  out.gap = sequence - cached;
  if (out.gap <= 0) ++head.counters().sequenceRegressions;
  if (!rng.bernoulli(0.5)) return out;
  out.inspected = true;

  if (out.gap != 1) {
    out.action = SequenceAction::Punished;
    out.path = estimatePath(head, origin, pathSeed);
    const double share = k.packetLossPunishRate / static_cast<double>(out.path.nodes.size());
    for (auto n : out.path.nodes) applyPunishment(head, n, share);
    return out;
  }

  out.action = SequenceAction::InOrder;
  if (rng.bernoulli(0.5)) {
    out.action = SequenceAction::Rewarded;
    out.path = estimatePath(head, origin, pathSeed);
    const double share = k.relayRewardRate / static_cast<double>(out.path.nodes.size());
    for (auto n : out.path.nodes) {
      if (auto* e = head.find(n)) {
        applyReward(*e, share);
        head.globalTable()[n] = e->trust;
        ++head.counters().rewards;
      }
    }
  }
  return out;
}

}  // namespace trustsense
