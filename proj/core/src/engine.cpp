#include "trustsense/engine.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "trustsense/models.hpp"
#include "trustsense/rng.hpp"

namespace trustsense {

std::string_view toString(PacketKind kind) {
  switch (kind) {
    case PacketKind::Registration:
      return "registration";
    case PacketKind::Data:
      return "data";
    case PacketKind::TrustUpdate:
      return "trust-update";
    case PacketKind::GlobalExchange:
      return "global-exchange";
    case PacketKind::TrustQuery:
      return "trust-query";
  }
  return "?";
}

std::string_view toString(TrustModelKind kind) {
  return kind == TrustModelKind::TrustSense ? "trustsense" : "eigentrust";
}

std::string_view toString(AdversaryMode mode) {
  return mode == AdversaryMode::Static ? "static" : "oscillating";
}

std::string_view toString(QueryModel model) { return model == QueryModel::Flood ? "flood" : "head"; }

Packet makeDataPacket(NodeId origin, std::int64_t sequence, double value) {
  Packet p;
  p.kind = PacketKind::Data;
  p.origin = origin;
  p.sequence = sequence;
  p.value = value;
  p.pathTrace.push_back(origin);
  return p;
}

void EnergyLedger::charge(NodeId node, double amount) {
  if (amount < 0.0) throw std::invalid_argument("energy charge must be nonnegative");
  perNode_[node] += amount;
  total_ += amount;
}

double EnergyLedger::of(NodeId node) const {
  auto it = perNode_.find(node);
  return it == perNode_.end() ? 0.0 : it->second;
}

void RunConfig::validate() const {
  if (sensorCount < 1) throw std::invalid_argument("sensorCount must be >= 1");
  if (clusterHeadCount < 1) throw std::invalid_argument("clusterHeadCount must be >= 1");
  if (!(maliciousFraction >= 0.0 && maliciousFraction <= 1.0)) {
    throw std::invalid_argument("maliciousFraction must be in [0,1]");
  }
  if (std::llround(maliciousFraction * static_cast<double>(sensorCount)) >=
      static_cast<long long>(sensorCount)) {
    throw std::invalid_argument("maliciousFraction leaves no benevolent sensor");
  }
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (!(energyPerUnitDistance >= 0.0)) throw std::invalid_argument("energyPerUnitDistance must be >= 0");
  if (!(multicastCost >= 0.0)) throw std::invalid_argument("multicastCost must be >= 0");
  if (!(eigentrust.preTrustWeight >= 0.0 && eigentrust.preTrustWeight <= 1.0)) {
    throw std::invalid_argument("eigentrustPreTrustWeight must be in [0,1]");
  }
  if (!(eigentrust.epsilon > 0.0)) throw std::invalid_argument("eigentrustEpsilon must be > 0");
  protocol.validate();
  adversary.validate();
}

Packet deliverHop(Packet packet, NodeId from, NodeId to, const NetworkTopology& topo,
                  EnergyLedger& ledger, double energyPerUnitDistance) {
  if (from == to) throw std::invalid_argument("deliverHop: self-loop");
  const bool toHead = topo.isClusterHead(to);
  if (toHead ? topo.clusterOf(from) != to || !topo.headInRange(from) : !topo.inRange(from, to)) {
    throw std::invalid_argument(
        fmt::format("deliverHop: {} cannot reach {} in one hop", from.value, to.value));
  }
  ledger.charge(from, energyPerUnitDistance * distance(topo.position(from), topo.position(to)));
  packet.pathTrace.push_back(to);
  packet.hopCount = packet.pathTrace.size() - 1;
  return packet;
}

SimContext::SimContext(const NetworkTopology& topo, const RunConfig& config,
                       const AdversaryState& adversary, EnergyLedger& sensorEnergy,
                       EnergyLedger& headEnergy, Rng& protocolRng, Rng& adversaryRng,
                       RunObserver* observer)
    : topo_(topo),
      config_(config),
      adversary_(adversary),
      sensorEnergy_(sensorEnergy),
      headEnergy_(headEnergy),
      protocolRng_(protocolRng),
      adversaryRng_(adversaryRng),
      observer_(observer) {
  clock_.trustUpdatePeriod = config.protocol.trustUpdatePeriod;
}

bool SimContext::relayForwards(NodeId relay) {
  if (!adversary_.isMalicious(relay)) return true;
  return maliciousForward(adversary_.profile(), adversaryRng_) == ForwardDecision::Forward;
}

void SimContext::chargeTransmission(PacketKind kind, NodeId sender, double distance) {
  sensorEnergy_.charge(sender, config_.energyPerUnitDistance * distance);
  if (observer_ != nullptr) observer_->onTransmission(clock_.round, kind, sender, distance);
}

void SimContext::reportRegistration(NodeId node, const FloodResult& flood,
                                    std::optional<RegistrationOutcome> outcome) {
  if (observer_ != nullptr) observer_->onRegistration(clock_.round, node, flood, outcome);
}

std::unique_ptr<TrustModel> makeTrustModel(const NetworkTopology& topo, const RunConfig& config) {
  switch (config.trustModel) {
    case TrustModelKind::TrustSense:
      return std::make_unique<TrustSenseModel>(topo, config);
    case TrustModelKind::EigenTrust:
      return std::make_unique<EigenTrustModel>(topo, config);
  }
  throw std::invalid_argument("unknown trust model");
}

MetricsRecord runSimulation(const RunConfig& config, const NetworkTopology& topo,
                            RunObserver* observer) {
  config.validate();
  if (topo.sensors().size() != config.sensorCount ||
      topo.clusterHeads().size() != config.clusterHeadCount) {
    throw std::invalid_argument(fmt::format(
        "topology has {} sensors / {} heads but config expects {} / {}", topo.sensors().size(),
        topo.clusterHeads().size(), config.sensorCount, config.clusterHeadCount));
  }

  Rng adversaryRng(config.rngSeed, 1);
  Rng protocolRng(config.rngSeed, 2);
  Rng senseRng(config.rngSeed, 3);

  const auto plan = assignAdversaries(topo, config.maliciousFraction, config.rngSeed);
  AdversaryState adversary(topo, plan, config.adversary);
  EnergyLedger sensorEnergy;
  EnergyLedger headEnergy;
  SimContext ctx(topo, config, adversary, sensorEnergy, headEnergy, protocolRng, adversaryRng,
                 observer);
  auto model = makeTrustModel(topo, config);

  std::vector<std::int64_t> nextSequence(topo.nodes().size(), 0);
  const auto hopLimit = topo.sensors().size() + 1;
  DeliveryTally tally;
  std::uint64_t deliveries = 0;
  std::uint64_t deliveredHops = 0;

  for (std::uint64_t round = 0; round < config.rounds; ++round) {
    ctx.setRound(round);
    adversary.oscillate(round, config.togglePeriod(), adversaryRng);
    if (observer != nullptr) observer->onRoundStart(round, adversary);
    model->beginRound(ctx);

    for (auto origin : topo.sensors()) {
      const bool malicious = adversary.isMalicious(origin);
      const double truth = config.field.valueAt(topo.position(origin));
      const double reported = malicious ? maliciousSense(adversary.profile(), truth, senseRng) : truth;
      Packet packet = makeDataPacket(origin, nextSequence[topo.indexOf(origin)]++, reported);
      const NodeId head = topo.clusterOf(origin);

      bool delivered = false;
      NodeId at = origin;
      const bool withheld = malicious && config.adversary.dropOwnPackets && !ctx.relayForwards(origin);
      while (!withheld) {
        if (topo.headInRange(at)) {
          packet = deliverHop(std::move(packet), at, head, topo, sensorEnergy,
                              config.energyPerUnitDistance);
          delivered = model->onHeadReceive(ctx, head, packet);
          break;
        }
        if (packet.hopCount >= hopLimit) break;
        const auto next = model->nextHop(ctx, at, packet);
        if (!next) break;
        packet = deliverHop(std::move(packet), at, *next, topo, sensorEnergy,
                            config.energyPerUnitDistance);
        if (!model->relayAccepts(ctx, *next, packet)) break;
        if (!ctx.relayForwards(*next)) break;
        at = *next;
      }

      if (delivered) {
        ++deliveries;
        deliveredHops += packet.hopCount;
      } else {
        model->onPacketLost(ctx, packet);
      }
      if (!malicious) {
        ++tally.benevolentOriginated;
        if (delivered && packet.value == truth) ++tally.benevolentIntact;
      }
      if (observer != nullptr) observer->onDataPacket(round, packet, delivered);
    }

    model->endRound(ctx);
  }

  if (observer != nullptr) observer->onRunEnd(*model);

  MetricsRecord m;
  m.accuracy = computeAccuracy(tally);
  m.avgPathLength = deliveries == 0 ? 0.0 : static_cast<double>(deliveredHops) / static_cast<double>(deliveries);
  m.energy = sensorEnergy.total();
  m.headEnergy = headEnergy.total();
  m.benevolentPackets = tally.benevolentOriginated;
  m.benevolentDelivered = tally.benevolentIntact;
  m.deliveries = deliveries;
  for (auto s : topo.sensors()) {
    if (adversary.everMalicious(s)) {
      ++m.maliciousSensors;
    } else {
      ++m.benevolentSensors;
    }
  }
  for (auto id : model->blacklisted()) {
    if (adversary.everMalicious(id)) {
      ++m.blacklistTruePositives;
    } else {
      ++m.blacklistFalsePositives;
    }
  }
  const auto c = model->counters();
  m.punishments = c.punishments;
  m.rewards = c.rewards;
  m.incidents = c.incidents;
  return m;
}

namespace {

std::string joinPath(const std::vector<NodeId>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i != 0) out += '>';
    out += std::to_string(path[i].value);
  }
  return out;
}

}  // namespace

EventLogWriter::EventLogWriter(std::ostream& out, bool header, bool groundTruth)
    : out_(out), groundTruth_(groundTruth) {
  if (header) out_ << "round,kind,origin,path,delivered,value\n";
}

void EventLogWriter::onRoundStart(std::uint64_t round, const AdversaryState& adversary) {
  if (!groundTruth_) return;
  for (auto id : adversary.malicious()) out_ << fmt::format("{},malicious,{},,,\n", round, id.value);
}

void EventLogWriter::onDataPacket(std::uint64_t round, const Packet& packet, bool delivered) {
  out_ << fmt::format("{},{},{},{},{},{}\n", round, toString(packet.kind), packet.origin.value,
                      joinPath(packet.pathTrace), delivered ? 1 : 0, packet.value);
}

void EventLogWriter::onRegistration(std::uint64_t round, NodeId node, const FloodResult& flood,
                                    std::optional<RegistrationOutcome> outcome) {
  out_ << fmt::format("{},{},{},{},{},\n", round, toString(PacketKind::Registration), node.value,
                      joinPath(flood.route), outcome == RegistrationOutcome::Registered ? 1 : 0);
}

void EventLogWriter::onTransmission(std::uint64_t round, PacketKind kind, NodeId sender,
                                    double distance) {
  out_ << fmt::format("{},{}-tx,{},{},1,{}\n", round, toString(kind), sender.value, sender.value,
                      distance);
}

}  // namespace trustsense
