#include "trustsense/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace trustsense {

double computeAccuracy(const DeliveryTally& tally) {
  if (tally.benevolentOriginated == 0) throw NoBenevolentTraffic();
  return static_cast<double>(tally.benevolentIntact) / static_cast<double>(tally.benevolentOriginated);
}

void ScoreWeights::validate() const {
  if (wA < 0 || wP < 0 || wE < 0) throw std::invalid_argument("score weights must be nonnegative");
  if (std::abs(wA + wP + wE - 100.0) > 1e-9) {
    throw std::invalid_argument(fmt::format("score weights must sum to 100 (got {})", wA + wP + wE));
  }
  if (!(aMax > 0) || !(pMax > 0) || !(eMaxRounding > 0)) {
    throw std::invalid_argument("aMax, pMax and eMaxRounding must be positive");
  }
}

double tradeoffScore(const MetricsRecord& m, const ScoreWeights& w, double eMax) {
  if (!(eMax > 0.0) || m.energy > eMax || m.energy < 0.0) {
    throw NormalizationBoundExceeded(
        fmt::format("normalization bound exceeded: energy {} vs eMax {}", m.energy, eMax));
  }
  if (m.avgPathLength > w.pMax || m.avgPathLength < 0.0) {
    throw NormalizationBoundExceeded(
        fmt::format("normalization bound exceeded: path length {} vs pMax {}", m.avgPathLength, w.pMax));
  }
  if (m.accuracy > w.aMax || m.accuracy < 0.0) {
    throw NormalizationBoundExceeded(
        fmt::format("normalization bound exceeded: accuracy {} vs aMax {}", m.accuracy, w.aMax));
  }
  const double accuracyN = m.accuracy / w.aMax;
  const double pathN = 1.0 - m.avgPathLength / w.pMax;
  const double energyN = 1.0 - m.energy / eMax;
  return w.wA * accuracyN + w.wP * pathN + w.wE * energyN;
}

double roundUpEnergyMax(double maxEnergy, double granularity) {
  if (!(granularity > 0.0)) throw std::invalid_argument("energy rounding granularity must be > 0");
  if (maxEnergy <= 0.0) return granularity;
  return std::ceil(maxEnergy / granularity) * granularity;
}

}  // namespace trustsense
