#pragma once

#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "trustsense/detection.hpp"
#include "trustsense/eigentrust.hpp"
#include "trustsense/engine.hpp"
#include "trustsense/protocol.hpp"

namespace trustsense {

/// Cluster-head driven reputation: registration floods, periodic
/// global/local updates, banded link selection, spatial outlier and
/// sequence-gap detection.
class TrustSenseModel final : public TrustModel {
 public:
  TrustSenseModel(const NetworkTopology& topo, const RunConfig& config);

  std::string_view name() const override { return "trustsense"; }
  void beginRound(SimContext& ctx) override;
  std::optional<NodeId> nextHop(SimContext& ctx, NodeId at, const Packet& packet) override;
  bool relayAccepts(SimContext& ctx, NodeId relay, const Packet& packet) override;
  bool onHeadReceive(SimContext& ctx, NodeId head, const Packet& packet) override;
  void onPacketLost(SimContext& ctx, const Packet& packet) override;
  void endRound(SimContext& ctx) override;
  std::set<NodeId> blacklisted() const override;
  ModelCounters counters() const override;

  const ClusterHeadState& head(NodeId id) const;
  std::span<const ClusterHeadState> heads() const { return heads_; }
  const SensorCache& cache(NodeId sensor) const;
  bool isRegistered(NodeId sensor) const;

 private:
  ClusterHeadState& headFor(NodeId sensor);
  void registrationPhase(SimContext& ctx);
  void disseminate(SimContext& ctx);

  const NetworkTopology& topo_;
  ProtocolConstants constants_;
  std::vector<ClusterHeadState> heads_;
  std::unordered_map<NodeId, std::size_t> headIndex_;
  std::unordered_map<NodeId, SensorCache> caches_;
  std::vector<NodeId> registrationOrder_;
  std::vector<std::map<NodeId, double>> windowReports_;  // per head
};

/// EigenTrust over end-to-end forwarding outcomes, recomputed each trust
/// update period; every recomputation costs one query message per sensor
/// with a nonzero ledger row, priced by EigenTrustSettings::queryModel.
class EigenTrustModel final : public TrustModel {
 public:
  EigenTrustModel(const NetworkTopology& topo, const RunConfig& config);

  std::string_view name() const override { return "eigentrust"; }
  void beginRound(SimContext& ctx) override;
  std::optional<NodeId> nextHop(SimContext& ctx, NodeId at, const Packet& packet) override;
  bool relayAccepts(SimContext& ctx, NodeId relay, const Packet& packet) override;
  bool onHeadReceive(SimContext& ctx, NodeId head, const Packet& packet) override;
  void onPacketLost(SimContext& ctx, const Packet& packet) override;
  void endRound(SimContext& ctx) override;
  std::set<NodeId> blacklisted() const override { return {}; }
  ModelCounters counters() const override { return counters_; }

  const TrustVector& globalTrust() const { return trust_; }
  const InteractionLedger& ledger() const { return ledger_; }

 private:
  void rate(const Packet& packet, bool satisfied);
  void chargeQuery(SimContext& ctx, NodeId querier);

  const NetworkTopology& topo_;
  RunConfig config_;
  InteractionLedger ledger_;
  TrustVector trust_;
  std::unordered_map<NodeId, DistanceMap> routes_;
  std::vector<std::vector<NodeId>> components_;  // sensor-graph connected components
  std::unordered_map<NodeId, std::size_t> componentOf_;
  std::unordered_map<NodeId, double> broadcastReach_;
  ModelCounters counters_;
};

}  // namespace trustsense
