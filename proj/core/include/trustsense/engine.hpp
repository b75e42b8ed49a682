#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "trustsense/adversary.hpp"
#include "trustsense/metrics.hpp"
#include "trustsense/protocol.hpp"
#include "trustsense/topology.hpp"

namespace trustsense {

class Rng;

enum class PacketKind { Registration, Data, TrustUpdate, GlobalExchange, TrustQuery };

std::string_view toString(PacketKind kind);

struct Packet {
  PacketKind kind = PacketKind::Data;
  NodeId origin;
  std::int64_t sequence = 0;  // data only
  double value = 0.0;         // data only
  std::vector<NodeId> pathTrace;
  std::size_t hopCount = 0;
};

Packet makeDataPacket(NodeId origin, std::int64_t sequence, double value);

class EnergyLedger {
 public:
  void charge(NodeId node, double amount);
  double of(NodeId node) const;
  double total() const { return total_; }
  const std::map<NodeId, double>& perNode() const { return perNode_; }

 private:
  std::map<NodeId, double> perNode_;
  double total_ = 0.0;
};

struct SimClock {
  std::uint64_t round = 0;
  int trustUpdatePeriod = 5;

  bool isUpdateRound() const { return round % static_cast<std::uint64_t>(trustUpdatePeriod) == 0; }
};

enum class TrustModelKind { TrustSense, EigenTrust };

std::string_view toString(TrustModelKind kind);
std::string_view toString(AdversaryMode mode);

/// How far an EigenTrust trust query travels. Flood: every sensor reachable
/// from the querier rebroadcasts it once (score managers have no known
/// location). Head: one transmission across the querier's distance to its head.
enum class QueryModel { Flood, Head };

std::string_view toString(QueryModel model);

struct EigenTrustSettings {
  double preTrustWeight = 0.1;
  double epsilon = 1e-9;
  std::size_t maxIterations = 1000;
  QueryModel queryModel = QueryModel::Flood;
};

struct RunConfig {
  std::size_t sensorCount = 100;
  std::size_t clusterHeadCount = 4;
  double maliciousFraction = 0.0;
  AdversaryProfile adversary;
  std::uint64_t rounds = 200;
  std::uint64_t rngSeed = 1;
  TrustModelKind trustModel = TrustModelKind::TrustSense;
  ProtocolConstants protocol;
  EigenTrustSettings eigentrust;
  SensedField field;
  double energyPerUnitDistance = 1.0;
  double multicastCost = 1.0;

  AdversaryMode adversaryMode() const { return adversary.oscillation; }
  int togglePeriod() const {
    return adversary.togglePeriod > 0 ? adversary.togglePeriod : protocol.trustUpdatePeriod;
  }

  /// Rejects out-of-range values and populations with no benevolent sensor.
  void validate() const;
};

/// Pre: `to` is a sensor neighbor of `from`, or `from`'s cluster-head in range.
/// Appends `to` to the trace and charges energyPerUnitDistance * distance to `from`.
Packet deliverHop(Packet packet, NodeId from, NodeId to, const NetworkTopology& topo,
                  EnergyLedger& ledger, double energyPerUnitDistance);

/// One-shot delivery of a local update to `recipients`; the head pays
/// `multicastCost` regardless of how many receive. Returns receptions.
template <typename Receive>
std::size_t multicastFromHead(NodeId head, const TrustUpdate& payload,
                              std::span<const NodeId> recipients, EnergyLedger& headLedger,
                              double multicastCost, Receive&& receive) {
  headLedger.charge(head, multicastCost);
  for (auto r : recipients) receive(r, payload);
  return recipients.size();
}

/// Hooks the engine calls during a run. Protocol state stays inside the
/// model; the engine owns traffic, energy, and adversarial behavior.
class TrustModel;

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void onRoundStart(std::uint64_t /*round*/, const AdversaryState& /*adversary*/) {}
  virtual void onDataPacket(std::uint64_t /*round*/, const Packet& /*packet*/, bool /*delivered*/) {}
  /// `outcome` is empty when the flood never reached the head.
  virtual void onRegistration(std::uint64_t /*round*/, NodeId /*node*/, const FloodResult& /*flood*/,
                              std::optional<RegistrationOutcome> /*outcome*/) {}
  /// Non-data transmissions (registration broadcasts, trust queries).
  virtual void onTransmission(std::uint64_t /*round*/, PacketKind /*kind*/, NodeId /*sender*/,
                              double /*distance*/) {}
  /// After the last round, with the model's final state.
  virtual void onRunEnd(const TrustModel& /*model*/) {}
};

class SimContext {
 public:
  SimContext(const NetworkTopology& topo, const RunConfig& config, const AdversaryState& adversary,
             EnergyLedger& sensorEnergy, EnergyLedger& headEnergy, Rng& protocolRng,
             Rng& adversaryRng, RunObserver* observer);

  const NetworkTopology& topology() const { return topo_; }
  const RunConfig& config() const { return config_; }
  std::uint64_t round() const { return clock_.round; }
  const SimClock& clock() const { return clock_; }
  void setRound(std::uint64_t round) { clock_.round = round; }

  Rng& protocolRng() { return protocolRng_; }
  EnergyLedger& headEnergy() { return headEnergy_; }

  /// Whether `relay` passes a packet on; malicious relays apply their drop policy.
  bool relayForwards(NodeId relay);

  /// Charge a non-data transmission of the given reach to a sensor.
  void chargeTransmission(PacketKind kind, NodeId sender, double distance);

  void reportRegistration(NodeId node, const FloodResult& flood,
                          std::optional<RegistrationOutcome> outcome);

 private:
  const NetworkTopology& topo_;
  const RunConfig& config_;
  const AdversaryState& adversary_;
  EnergyLedger& sensorEnergy_;
  EnergyLedger& headEnergy_;
  Rng& protocolRng_;
  Rng& adversaryRng_;
  RunObserver* observer_;
  SimClock clock_;
};

struct ModelCounters {
  std::uint64_t punishments = 0;
  std::uint64_t rewards = 0;
  std::uint64_t incidents = 0;
  std::uint64_t unconvergedRecomputations = 0;
};

/// Interface every trust model implements so the engine can swap them.
class TrustModel {
 public:
  virtual ~TrustModel() = default;

  virtual std::string_view name() const = 0;
  /// Start of every round, before any sensor transmits.
  virtual void beginRound(SimContext& ctx) = 0;
  /// Next hop for a packet currently held by sensor `at`, or none.
  virtual std::optional<NodeId> nextHop(SimContext& ctx, NodeId at, const Packet& packet) = 0;
  /// Whether a sensor that just received `packet` is willing to carry it.
  virtual bool relayAccepts(SimContext& ctx, NodeId relay, const Packet& packet) = 0;
  /// Head-side reception. Returns false if the head discards the packet.
  virtual bool onHeadReceive(SimContext& ctx, NodeId head, const Packet& packet) = 0;
  /// Engine-observed loss (drop, refusal, dead end).
  virtual void onPacketLost(SimContext& ctx, const Packet& packet) = 0;
  /// End of the bundling window.
  virtual void endRound(SimContext& ctx) = 0;

  virtual std::set<NodeId> blacklisted() const = 0;
  virtual ModelCounters counters() const = 0;
};

std::unique_ptr<TrustModel> makeTrustModel(const NetworkTopology& topo, const RunConfig& config);

/// One full run. Deterministic in (config, topo).
MetricsRecord runSimulation(const RunConfig& config, const NetworkTopology& topo,
                            RunObserver* observer = nullptr);

/// Writes `round,kind,origin,path,delivered,value` lines. Paths are
/// `>`-joined ids. Non-data transmissions log the sender as origin and
/// path and the charged distance as value.
class EventLogWriter : public RunObserver {
 public:
  /// With `groundTruth`, each round starts with one `malicious` line per
  /// currently malicious sensor.
  explicit EventLogWriter(std::ostream& out, bool header = true, bool groundTruth = false);

  void onRoundStart(std::uint64_t round, const AdversaryState& adversary) override;

  void onDataPacket(std::uint64_t round, const Packet& packet, bool delivered) override;
  void onRegistration(std::uint64_t round, NodeId node, const FloodResult& flood,
                      std::optional<RegistrationOutcome> outcome) override;
  void onTransmission(std::uint64_t round, PacketKind kind, NodeId sender, double distance) override;

 private:
  std::ostream& out_;
  bool groundTruth_;
};

}  // namespace trustsense
