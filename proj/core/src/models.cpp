#include "trustsense/models.hpp"

#include <algorithm>

#include "trustsense/rng.hpp"

namespace trustsense {

// ---------------------------------------------------------------------------
// TrustSense

TrustSenseModel::TrustSenseModel(const NetworkTopology& topo, const RunConfig& config)
    : topo_(topo), constants_(config.protocol) {
  constants_.validate();
  for (auto h : topo.clusterHeads()) {
    headIndex_.emplace(h, heads_.size());
    heads_.emplace_back(h, topo.position(h), topo.radioRange(), constants_);
  }
  windowReports_.resize(heads_.size());
  for (auto s : topo.sensors()) caches_.emplace(s, makeSensorCache(topo, s));

  // Nodes nearest their head register first so that they can relay the
  // floods of nodes farther out during initial deployment.
  registrationOrder_ = topo.sensors();
  std::stable_sort(registrationOrder_.begin(), registrationOrder_.end(), [&](NodeId a, NodeId b) {
    return topo.distanceToHead(a) < topo.distanceToHead(b);
  });
}

ClusterHeadState& TrustSenseModel::headFor(NodeId sensor) {
  return heads_[headIndex_.at(topo_.clusterOf(sensor))];
}

const ClusterHeadState& TrustSenseModel::head(NodeId id) const { return heads_[headIndex_.at(id)]; }

const SensorCache& TrustSenseModel::cache(NodeId sensor) const { return caches_.at(sensor); }

bool TrustSenseModel::isRegistered(NodeId sensor) const {
  return head(topo_.clusterOf(sensor)).find(sensor) != nullptr;
}

void TrustSenseModel::registrationPhase(SimContext& ctx) {
  for (auto s : registrationOrder_) {
    if (isRegistered(s)) continue;
    auto& head = headFor(s);
    auto willForward = [&](NodeId relay) {
      return isRegistered(relay) && !caches_.at(relay).blacklist.contains(s) && ctx.relayForwards(relay);
    };
    const auto flood = floodRegistration(s, head.id(), topo_, willForward);
    for (const auto& b : flood.broadcasts) {
      ctx.chargeTransmission(PacketKind::Registration, b.sender, b.reach);
    }
    std::optional<RegistrationOutcome> outcome;
    if (flood.delivered) {
      const NodeId ipLink = flood.route.size() > 1 ? flood.route[1] : head.id();
      outcome = registerNode(head, {s, topo_.position(s), ipLink});
    }
    ctx.reportRegistration(s, flood, outcome);
  }
}

void TrustSenseModel::disseminate(SimContext& ctx) {
  globalUpdate(heads_);
  for (auto& head : heads_) {
    const auto update = localUpdate(head, ctx.protocolRng());
    std::vector<NodeId> recipients;
    recipients.reserve(head.localTable().size());
    for (const auto& [id, e] : head.localTable()) recipients.push_back(id);
    multicastFromHead(head.id(), update, recipients, ctx.headEnergy(), ctx.config().multicastCost,
                      [&](NodeId r, const TrustUpdate& u) { receiveUpdate(caches_.at(r), u, topo_); });
  }
}

void TrustSenseModel::beginRound(SimContext& ctx) {
  if (!ctx.clock().isUpdateRound()) return;
  registrationPhase(ctx);
  disseminate(ctx);
}

std::optional<NodeId> TrustSenseModel::nextHop(SimContext& /*ctx*/, NodeId at, const Packet& /*packet*/) {
  return selectLink(caches_.at(at), constants_.thresholds).node;
}

bool TrustSenseModel::relayAccepts(SimContext& /*ctx*/, NodeId relay, const Packet& packet) {
  return !caches_.at(relay).blacklist.contains(packet.origin);
}

bool TrustSenseModel::onHeadReceive(SimContext& ctx, NodeId headId, const Packet& packet) {
  const auto hi = headIndex_.at(headId);
  auto& head = heads_[hi];
  auto* entry = head.find(packet.origin);
  if (entry == nullptr) return false;
  entry->reportedThisWindow = true;
  entry->lastValue = packet.value;
  windowReports_[hi][packet.origin] = packet.value;
  inspectSequence(head, packet.origin, packet.sequence, head.pathSeed(), ctx.protocolRng());
  return true;
}

void TrustSenseModel::onPacketLost(SimContext& /*ctx*/, const Packet& /*packet*/) {
  // Heads only learn about losses through sequence gaps.
}

void TrustSenseModel::endRound(SimContext& ctx) {
  const auto window = static_cast<std::uint64_t>(constants_.bundlingWindow);
  if ((ctx.round() + 1) % window != 0) return;
  for (std::size_t hi = 0; hi < heads_.size(); ++hi) {
    auto& head = heads_[hi];
    const auto& reports = windowReports_[hi];
    for (const auto& [id, value] : reports) {
      if (head.find(id) == nullptr) continue;
      checkDataConsistency(head, id, value, reports, ctx.round(), ctx.protocolRng());
    }
    decaySpatialPresence(head);
    windowReports_[hi].clear();
  }
}

std::set<NodeId> TrustSenseModel::blacklisted() const {
  std::set<NodeId> out;
  for (const auto& h : heads_) out.insert(h.blacklist().begin(), h.blacklist().end());
  return out;
}

ModelCounters TrustSenseModel::counters() const {
  ModelCounters c;
  for (const auto& h : heads_) {
    c.punishments += h.counters().punishments;
    c.rewards += h.counters().rewards;
    c.incidents += h.incidents().size();
  }
  return c;
}

// ---------------------------------------------------------------------------
// EigenTrust

EigenTrustModel::EigenTrustModel(const NetworkTopology& topo, const RunConfig& config)
    : topo_(topo), config_(config) {
  trust_.peers = topo.sensors();
  trust_.values.assign(trust_.peers.size(), 1.0 / static_cast<double>(trust_.peers.size()));
  for (auto s : topo.sensors()) {
    routes_.emplace(s, topo.distanceMap(s));
    double reach = 0.0;
    for (auto n : topo.neighbors(s)) reach = std::max(reach, distance(topo.position(s), topo.position(n)));
    broadcastReach_.emplace(s, reach);
  }
  for (auto s : topo.sensors()) {
    if (componentOf_.contains(s)) continue;
    const auto c = components_.size();
    auto& members = components_.emplace_back();
    std::vector<NodeId> stack{s};
    componentOf_.emplace(s, c);
    while (!stack.empty()) {
      const auto at = stack.back();
      stack.pop_back();
      members.push_back(at);
      for (auto n : topo.neighbors(at)) {
        if (componentOf_.emplace(n, c).second) stack.push_back(n);
      }
    }
    std::sort(members.begin(), members.end());
  }
}

void EigenTrustModel::chargeQuery(SimContext& ctx, NodeId querier) {
  if (config_.eigentrust.queryModel == QueryModel::Head) {
    ctx.chargeTransmission(PacketKind::TrustQuery, querier, topo_.distanceToHead(querier));
    return;
  }
  for (auto n : components_[componentOf_.at(querier)]) {
    ctx.chargeTransmission(PacketKind::TrustQuery, n, broadcastReach_.at(n));
  }
}

void EigenTrustModel::beginRound(SimContext& ctx) {
  if (!ctx.clock().isUpdateRound()) return;
  auto c = localTrustMatrix(ledger_, trust_.peers);
  c.setPreTrustWeight(config_.eigentrust.preTrustWeight);
  auto result = computeGlobalTrust(c, config_.eigentrust.epsilon, config_.eigentrust.maxIterations);
  if (!result.converged) ++counters_.unconvergedRecomputations;
  trust_.values = std::move(result.trust);

  for (const auto& [rater, row] : ledger_.rows()) {
    const bool nonzero = std::any_of(row.begin(), row.end(),
                                     [](const auto& e) { return e.second.sat + e.second.unsat > 0; });
    if (nonzero) chargeQuery(ctx, rater);
  }
}

std::optional<NodeId> EigenTrustModel::nextHop(SimContext& /*ctx*/, NodeId at, const Packet& /*packet*/) {
  return eigentrustSelectLink(routes_.at(at), topo_.distanceToHead(at), trust_);
}

bool EigenTrustModel::relayAccepts(SimContext& /*ctx*/, NodeId /*relay*/, const Packet& /*packet*/) {
  return true;
}

bool EigenTrustModel::onHeadReceive(SimContext& /*ctx*/, NodeId /*head*/, const Packet& packet) {
  rate(packet, true);
  return true;
}

void EigenTrustModel::onPacketLost(SimContext& /*ctx*/, const Packet& packet) { rate(packet, false); }

void EigenTrustModel::endRound(SimContext& /*ctx*/) {}

void EigenTrustModel::rate(const Packet& packet, bool satisfied) {
  // The origin rates every sensor that carried its packet.
  for (std::size_t i = 1; i < packet.pathTrace.size(); ++i) {
    const NodeId relay = packet.pathTrace[i];
    if (topo_.isClusterHead(relay)) continue;
    if (satisfied) {
      ledger_.recordSatisfied(packet.origin, relay);
    } else {
      ledger_.recordUnsatisfied(packet.origin, relay);
    }
  }
}

}  // namespace trustsense
