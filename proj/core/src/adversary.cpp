#include "trustsense/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trustsense/rng.hpp"

namespace trustsense {

namespace {

bool isProbability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void AdversaryProfile::validate() const {
  if (!isProbability(dropProbability)) throw std::invalid_argument("dropProbability must be in [0,1]");
  if (!isProbability(toggleProbability)) {
    throw std::invalid_argument("toggleProbability must be in [0,1]");
  }
  if (togglePeriod < 0) throw std::invalid_argument("togglePeriod must be >= 0");
  if (falsify == FalsifyMode::Random && falsifyAmount < 0.0) {
    throw std::invalid_argument("random falsification range must be >= 0");
  }
  if (dropMode == DropMode::None && falsify == FalsifyMode::None) {
    throw std::invalid_argument("malicious profile must drop or falsify");
  }
}

PopulationPlan assignAdversaries(const NetworkTopology& topo, double fraction, std::uint64_t rngSeed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("maliciousFraction must be in [0,1]");
  }
  std::vector<NodeId> pool = topo.sensors();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size())));
  Rng rng(rngSeed, /*stream=*/0xadf);
  // Partial Fisher-Yates: the first `count` slots are the sample.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  PopulationPlan plan;
  plan.maliciousFraction = fraction;
  plan.assignment.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(plan.assignment.begin(), plan.assignment.end());
  return plan;
}

ForwardDecision maliciousForward(const AdversaryProfile& profile, Rng& rng) {
  switch (profile.dropMode) {
    case DropMode::None:
      return ForwardDecision::Forward;
    case DropMode::Full:
      return ForwardDecision::Drop;
    case DropMode::Selective:
      return rng.bernoulli(profile.dropProbability) ? ForwardDecision::Drop : ForwardDecision::Forward;
  }
  return ForwardDecision::Forward;
}

double maliciousSense(const AdversaryProfile& profile, double trueValue, Rng& rng) {
  switch (profile.falsify) {
    case FalsifyMode::None:
      return trueValue;
    case FalsifyMode::Offset:
      return trueValue + profile.falsifyAmount;
    case FalsifyMode::Random:
      return trueValue + rng.uniform(-profile.falsifyAmount, profile.falsifyAmount);
  }
  return trueValue;
}

AdversaryState::AdversaryState(const NetworkTopology& topo, const PopulationPlan& plan,
                               AdversaryProfile profile)
    : profile_(profile), sensors_(topo.sensors()) {
  malicious_.assign(sensors_.size(), 0);
  for (auto id : plan.assignment) {
    if (!topo.contains(id) || topo.isClusterHead(id)) {
      throw std::invalid_argument("population plan may only name sensors");
    }
    auto& flag = malicious_[slot(id)];
    if (!flag) {
      flag = 1;
      ++maliciousCount_;
    }
  }
  ever_ = malicious_;
}

std::size_t AdversaryState::slot(NodeId id) const {
  auto it = std::lower_bound(sensors_.begin(), sensors_.end(), id);
  if (it == sensors_.end() || *it != id) throw UnregisteredNode(id);
  return static_cast<std::size_t>(it - sensors_.begin());
}

bool AdversaryState::isMalicious(NodeId id) const {
  auto it = std::lower_bound(sensors_.begin(), sensors_.end(), id);
  if (it == sensors_.end() || *it != id) return false;  // heads and strangers
  return malicious_[static_cast<std::size_t>(it - sensors_.begin())] != 0;
}

bool AdversaryState::everMalicious(NodeId id) const {
  auto it = std::lower_bound(sensors_.begin(), sensors_.end(), id);
  if (it == sensors_.end() || *it != id) return false;
  return ever_[static_cast<std::size_t>(it - sensors_.begin())] != 0;
}

std::vector<NodeId> AdversaryState::malicious() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < sensors_.size(); ++i) {
    if (malicious_[i]) out.push_back(sensors_[i]);
  }
  return out;
}

std::size_t AdversaryState::oscillate(std::uint64_t round, int togglePeriod, Rng& rng) {
  if (profile_.oscillation != AdversaryMode::Oscillating || togglePeriod < 1) return 0;
  if (round == 0 || round % static_cast<std::uint64_t>(togglePeriod) != 0) return 0;

  std::vector<std::size_t> bad;
  std::vector<std::size_t> good;
  for (std::size_t i = 0; i < sensors_.size(); ++i) (malicious_[i] ? bad : good).push_back(i);

  std::size_t swaps = 0;
  for (auto b : bad) {
    if (good.empty()) break;
    if (!rng.bernoulli(profile_.toggleProbability)) continue;
    const auto pick = rng.below(good.size());
    const auto g = good[pick];
    good[pick] = good.back();
    good.pop_back();
    malicious_[b] = 0;
    malicious_[g] = 1;
    ever_[g] = 1;
    ++swaps;
  }
  return swaps;
}

}  // namespace trustsense
