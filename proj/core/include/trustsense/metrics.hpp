#pragma once

#include <cstdint>
#include <stdexcept>

namespace trustsense {

struct MetricsRecord {
  double accuracy = 0.0;       // [0, 1]
  double avgPathLength = 0.0;  // hops, over accepted deliveries
  double energy = 0.0;         // sensor transmit energy
  std::uint64_t blacklistTruePositives = 0;
  std::uint64_t blacklistFalsePositives = 0;

  std::uint64_t benevolentPackets = 0;
  std::uint64_t benevolentDelivered = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t punishments = 0;
  std::uint64_t rewards = 0;
  std::uint64_t incidents = 0;
  std::uint64_t maliciousSensors = 0;  // ever malicious during the run
  std::uint64_t benevolentSensors = 0;  // never malicious
  double headEnergy = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

class NoBenevolentTraffic : public std::domain_error {
 public:
  NoBenevolentTraffic() : std::domain_error("no benevolent traffic") {}
};

class NormalizationBoundExceeded : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Benevolent-origin data packets, and how many reached their head unaltered.
struct DeliveryTally {
  std::uint64_t benevolentOriginated = 0;
  std::uint64_t benevolentIntact = 0;
};

/// benevolentIntact / benevolentOriginated; throws NoBenevolentTraffic on 0/0.
double computeAccuracy(const DeliveryTally& tally);

struct ScoreWeights {
  double wA = 40.0;
  double wP = 20.0;
  double wE = 40.0;
  double aMax = 1.0;
  double pMax = 100.0;  // sensor count
  double eMaxRounding = 100000.0;

  void validate() const;
};

/// wA * A/aMax + wP * (1 - P/pMax) + wE * (1 - E/eMax).
/// Throws NormalizationBoundExceeded if a metric exceeds its bound.
double tradeoffScore(const MetricsRecord& m, const ScoreWeights& w, double eMax);

/// Smallest positive multiple of `granularity` that is >= maxEnergy.
double roundUpEnergyMax(double maxEnergy, double granularity);

}  // namespace trustsense
