#pragma once

#include <cstdint>
#include <vector>

#include "trustsense/topology.hpp"

namespace trustsense {

class Rng;

enum class DropMode { None, Full, Selective };
enum class FalsifyMode { None, Offset, Random };
enum class AdversaryMode { Static, Oscillating };

struct AdversaryProfile {
  DropMode dropMode = DropMode::Selective;
  double dropProbability = 0.5;  // Selective only
  FalsifyMode falsify = FalsifyMode::Offset;
  double falsifyAmount = 10.0;  // offset delta, or half-width for Random
  AdversaryMode oscillation = AdversaryMode::Static;
  /// Rounds between toggles; 0 means "use the trust update period".
  int togglePeriod = 0;
  double toggleProbability = 0.5;
  /// Whether the drop policy also withholds the sensor's own readings.
  bool dropOwnPackets = true;

  /// Throws std::invalid_argument on bad probabilities or a profile that
  /// neither drops nor falsifies.
  void validate() const;
};

/// Which sensors start out malicious. Cluster-heads are never included.
struct PopulationPlan {
  double maliciousFraction = 0.0;
  std::vector<NodeId> assignment;  // ascending
};

/// Exactly round(fraction * sensors) sensors, chosen uniformly under `rngSeed`.
PopulationPlan assignAdversaries(const NetworkTopology& topo, double fraction, std::uint64_t rngSeed);

enum class ForwardDecision { Forward, Drop };

ForwardDecision maliciousForward(const AdversaryProfile& profile, Rng& rng);

double maliciousSense(const AdversaryProfile& profile, double trueValue, Rng& rng);

/// Ground truth for the smooth phenomenon every honest sensor observes.
struct SensedField {
  double base = 20.0;
  double gradient = 0.05;
  double valueAt(Position p) const { return base + gradient * p.x; }
};

/// Per-run malicious/benevolent state of every sensor.
class AdversaryState {
 public:
  AdversaryState(const NetworkTopology& topo, const PopulationPlan& plan, AdversaryProfile profile);

  const AdversaryProfile& profile() const { return profile_; }
  bool isMalicious(NodeId id) const;
  bool everMalicious(NodeId id) const;
  std::size_t maliciousCount() const { return maliciousCount_; }
  std::vector<NodeId> malicious() const;

  /// Oscillating mode only: at each toggle boundary every malicious sensor,
  /// with toggleProbability, swaps state with a randomly drawn benevolent
  /// sensor not yet swapped this boundary. The malicious count never
  /// changes. Returns the number of swaps.
  std::size_t oscillate(std::uint64_t round, int togglePeriod, Rng& rng);

 private:
  AdversaryProfile profile_;
  std::vector<NodeId> sensors_;
  std::vector<char> malicious_;  // by position in sensors_
  std::vector<char> ever_;
  std::size_t maliciousCount_ = 0;

  std::size_t slot(NodeId id) const;
};

}  // namespace trustsense
