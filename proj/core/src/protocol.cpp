#include "trustsense/protocol.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "trustsense/rng.hpp"

namespace trustsense {

void TrustThresholds::validate() const {
  if (!(0.0 < medium && medium < good && good < 1.0)) {
    throw std::invalid_argument(
        fmt::format("trust thresholds must satisfy 0 < medium < good < 1 (got medium={}, good={})",
                    medium, good));
  }
}

void ProtocolConstants::validate() const {
  thresholds.validate();
  const std::array<std::pair<const char*, double>, 5> rates{{
      {"relayRewardRate", relayRewardRate},
      {"consistencyRewardRate", consistencyRewardRate},
      {"packetLossPunishRate", packetLossPunishRate},
      {"outlierPunishRate", outlierPunishRate},
      {"spatialPresenceStep", spatialPresenceStep},
  }};
  for (const auto& [name, v] : rates) {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("{} must be > 0", name));
  }
  if (maxOutlierSequence < 1) throw std::invalid_argument("maxOutlierSequence must be >= 1");
  if (maxClusterSize < 1) throw std::invalid_argument("maxClusterSize must be >= 1");
  if (!(outlierThreshold >= 0.0)) throw std::invalid_argument("outlierThreshold must be >= 0");
  if (trustUpdatePeriod < 1) throw std::invalid_argument("trustUpdatePeriod must be >= 1");
  if (bundlingWindow < 1) throw std::invalid_argument("bundlingWindow must be >= 1");
}

double defaultTrust(const TrustThresholds& thresholds) {
  return 0.25 * thresholds.good + 0.75 * thresholds.medium;
}

// ---------------------------------------------------------------------------
// ClusterHeadState

ClusterHeadState::ClusterHeadState(NodeId id, Position position, double radioRange,
                                   ProtocolConstants constants)
    : id_(id), position_(position), radioRange_(radioRange), constants_(constants) {
  constants_.validate();
}

LocalTrustEntry* ClusterHeadState::find(NodeId id) {
  auto it = local_.find(id);
  return it == local_.end() ? nullptr : &it->second;
}

const LocalTrustEntry* ClusterHeadState::find(NodeId id) const {
  auto it = local_.find(id);
  return it == local_.end() ? nullptr : &it->second;
}

void ClusterHeadState::forget(NodeId id) {
  if (auto it = local_.find(id); it != local_.end()) {
    for (auto n : it->second.spatialNeighbors) {
      if (auto* e = find(n)) e->spatialNeighbors.erase(id);
    }
    local_.erase(it);
  }
  global_.erase(id);
}

void ClusterHeadState::addToBlacklist(NodeId id) {
  forget(id);
  if (blacklist_.insert(id).second) ++counters_.blacklisted;
}

void ClusterHeadState::recordAnnouncement(std::map<NodeId, AnnouncedEntry> snapshot, int pathSeed) {
  announced_ = std::move(snapshot);
  pathSeed_ = pathSeed;
}

// ---------------------------------------------------------------------------
// Registration

RegistrationOutcome registerNode(ClusterHeadState& head, const RegistrationRequest& request) {
  auto& local = head.localTable();
  if (local.contains(request.id)) return RegistrationOutcome::AlreadyRegistered;
  if (head.isBlacklisted(request.id)) {
    ++head.counters().rejectedRegistrations;
    return RegistrationOutcome::Blacklisted;
  }
  if (local.size() >= head.constants().maxClusterSize) {
    ++head.counters().rejectedRegistrations;
    return RegistrationOutcome::ClusterFull;
  }

  double trust = defaultTrust(head.constants().thresholds);
  auto& global = head.globalTable();
  if (auto it = global.find(request.id); it != global.end()) {
    trust = it->second;
  } else {
    global.emplace(request.id, trust);
  }

  LocalTrustEntry entry;
  entry.id = request.id;
  entry.trust = trust;
  entry.location = request.location;
  entry.ipLink = request.ipLink;
  for (auto& [id, e] : local) {
    if (distance(e.location, request.location) < head.radioRange()) {
      e.spatialNeighbors.insert(request.id);
      entry.spatialNeighbors.insert(id);
    }
  }
  local.emplace(request.id, std::move(entry));
  return RegistrationOutcome::Registered;
}

FloodResult floodRegistration(NodeId newNode, NodeId targetHead, const NetworkTopology& topo,
                              const std::function<bool(NodeId)>& willForward) {
  const Position hp = topo.position(targetHead);
  const double range = topo.radioRange();
  FloodResult result;

  std::unordered_map<NodeId, NodeId> parent;
  std::deque<NodeId> frontier{newNode};
  parent.emplace(newNode, newNode);
  std::optional<NodeId> reachedVia;

  while (!frontier.empty()) {
    const NodeId sender = frontier.front();
    frontier.pop_front();
    const Position sp = topo.position(sender);
    const double senderToHead = distance(sp, hp);

    double reach = 0.0;
    for (auto n : topo.neighbors(sender)) reach = std::max(reach, distance(sp, topo.position(n)));
    if (senderToHead < range) {
      reach = std::max(reach, senderToHead);
      if (!reachedVia) reachedVia = sender;
    }
    result.broadcasts.push_back({sender, reach});

    for (auto n : topo.neighbors(sender)) {
      if (parent.contains(n)) continue;
      parent.emplace(n, sender);
      if (distance(topo.position(n), hp) < senderToHead && willForward(n)) {
        frontier.push_back(n);
      }
    }
  }

  if (reachedVia) {
    result.delivered = true;
    for (NodeId at = *reachedVia;; at = parent.at(at)) {
      result.route.push_back(at);
      if (at == newNode) break;
    }
    std::reverse(result.route.begin(), result.route.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Link selection

TrustBand bandForSeed(int seed) {
  if (seed < 0 || seed > 100) {
    throw std::invalid_argument(fmt::format("path seed {} outside [0, 100]", seed));
  }
  if (seed < 60) return TrustBand::High;
  if (seed < 90) return TrustBand::Medium;
  return TrustBand::Suspect;
}

bool inBand(double trust, TrustBand band, const TrustThresholds& t) {
  switch (band) {
    case TrustBand::High:
      return trust >= t.good && trust <= 1.0;
    case TrustBand::Medium:
      return trust >= t.medium && trust < t.good;
    case TrustBand::Suspect:
      return trust < t.medium;
  }
  return false;
}

LinkChoice selectLink(std::span<const LinkCandidate> neighbors, double ownDistanceToHead, int seed,
                      const TrustThresholds& thresholds) {
  const TrustBand start = bandForSeed(seed);
  std::array<TrustBand, 3> order{};
  switch (start) {
    case TrustBand::High:
      order = {TrustBand::High, TrustBand::Medium, TrustBand::Suspect};
      break;
    case TrustBand::Medium:
      order = {TrustBand::Medium, TrustBand::Suspect, TrustBand::High};
      break;
    case TrustBand::Suspect:
      order = {TrustBand::Suspect, TrustBand::High, TrustBand::Medium};
      break;
  }

  std::vector<NodeId> candidates;
  for (auto band : order) {
    candidates.clear();
    for (const auto& n : neighbors) {
      if (n.distanceToHead <= ownDistanceToHead && inBand(n.trust, band, thresholds)) {
        candidates.push_back(n.id);
      }
    }
    if (!candidates.empty()) {
      const auto pick = static_cast<std::size_t>(seed) % candidates.size();
      return {candidates[pick], band};
    }
  }
  return {std::nullopt, start};
}

SensorCache makeSensorCache(const NetworkTopology& topo, NodeId sensor) {
  SensorCache cache;
  cache.id = sensor;
  cache.head = topo.clusterOf(sensor);
  cache.position = topo.position(sensor);
  cache.distanceToHead = topo.distanceToHead(sensor);
  cache.distanceMap = topo.distanceMap(sensor);
  return cache;
}

void receiveUpdate(SensorCache& cache, const TrustUpdate& update, const NetworkTopology& topo) {
  const Position hp = topo.position(cache.head);
  const auto& physical = topo.neighbors(cache.id);
  cache.trust.clear();
  cache.distanceMap.clear();
  for (const auto& [id, trust] : update.entries) {
    if (id == cache.id) continue;
    if (!std::binary_search(physical.begin(), physical.end(), id)) continue;
    cache.trust.emplace(id, trust);
    cache.distanceMap.push_back({id, distance(topo.position(id), hp)});
  }
  std::sort(cache.distanceMap.begin(), cache.distanceMap.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  cache.blacklist.insert(update.blacklist.begin(), update.blacklist.end());
  cache.pathSeed = update.pathSeed;
  cache.heardUpdate = true;
}

LinkChoice selectLink(const SensorCache& cache, const TrustThresholds& thresholds) {
  const double fallback = defaultTrust(thresholds);
  std::vector<LinkCandidate> candidates;
  candidates.reserve(cache.distanceMap.size());
  for (const auto& n : cache.distanceMap) {
    if (cache.blacklist.contains(n.id)) continue;
    auto it = cache.trust.find(n.id);
    candidates.push_back({n.id, n.distanceToHead, it == cache.trust.end() ? fallback : it->second});
  }
  return selectLink(candidates, cache.distanceToHead, cache.pathSeed, thresholds);
}

// ---------------------------------------------------------------------------
// Reputation updates

double applyReward(LocalTrustEntry& entry, double rate) {
  entry.trust = std::min(1.0, entry.trust + rate);
  return entry.trust;
}

PunishOutcome applyPunishment(ClusterHeadState& head, NodeId id, double rate) {
  auto* entry = head.find(id);
  if (entry == nullptr) {
    ++head.counters().unknownPunishTargets;
    return PunishOutcome::UnknownNode;
  }
  ++head.counters().punishments;
  entry->trust -= rate;
  if (entry->trust < 0.0) {
    head.addToBlacklist(id);
    return PunishOutcome::Blacklisted;
  }
  head.globalTable()[id] = entry->trust;
  return PunishOutcome::Applied;
}

void globalUpdate(std::span<ClusterHeadState> heads) {
  std::set<NodeId> blacklisted;
  std::map<NodeId, double> authoritative;
  for (const auto& h : heads) {
    blacklisted.insert(h.blacklist().begin(), h.blacklist().end());
    for (const auto& [id, e] : h.localTable()) authoritative[id] = e.trust;
  }
  for (auto& h : heads) {
    for (const auto& [id, trust] : authoritative) h.globalTable()[id] = trust;
    for (auto id : blacklisted) {
      h.globalTable().erase(id);
      if (h.find(id) != nullptr) h.forget(id);
    }
  }
}

TrustUpdate localUpdate(ClusterHeadState& head, Rng& rng) {
  TrustUpdate update;
  update.head = head.id();
  std::map<NodeId, AnnouncedEntry> snapshot;
  for (const auto& [id, e] : head.localTable()) {
    update.entries.emplace_back(id, e.trust);
    snapshot.emplace(id, AnnouncedEntry{e.trust, e.location});
  }
  update.blacklist.assign(head.blacklist().begin(), head.blacklist().end());
  update.pathSeed = static_cast<int>(rng.between(0, 100));
  head.recordAnnouncement(std::move(snapshot), update.pathSeed);
  return update;
}

std::vector<NodeId> decaySpatialPresence(ClusterHeadState& head) {
  const double step = head.constants().spatialPresenceStep;
  std::vector<NodeId> removed;
  for (auto& [id, e] : head.localTable()) {
    if (e.reportedThisWindow) {
      e.spatialPresence = 1.0;
    } else {
      e.spatialPresence = std::max(0.0, e.spatialPresence - step);
      if (e.spatialPresence <= 1e-12) removed.push_back(id);
    }
    e.reportedThisWindow = false;
  }
  for (auto id : removed) {
    head.forget(id);
    ++head.counters().removedForAbsence;
  }
  return removed;
}

}  // namespace trustsense
