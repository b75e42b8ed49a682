#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustsense/engine.hpp"
#include "trustsense/metrics.hpp"
#include "trustsense/topology.hpp"

namespace trustsense {

struct SweepSpec {
  std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t runsPerPoint = 30;
  std::vector<AdversaryMode> adversaryModes{AdversaryMode::Static, AdversaryMode::Oscillating};
  std::vector<TrustModelKind> models{TrustModelKind::TrustSense, TrustModelKind::EigenTrust};
  std::uint64_t baseSeed = 1;

  void validate() const;
};

/// Everything a config file can set. `weights.pMax` follows the sensor
/// count unless the file sets it explicitly.
struct ExperimentConfig {
  TopologyConfig topology;
  RunConfig run;
  ScoreWeights weights;
  SweepSpec sweep;
  bool pMaxExplicit = false;

  ScoreWeights effectiveWeights() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment; lists are comma separated.
/// Unknown keys and malformed values throw ConfigError naming the line.
ExperimentConfig parseConfig(std::istream& in, ExperimentConfig base = {});
ExperimentConfig loadConfig(const std::filesystem::path& path);
/// Apply a single assignment; used by the parser and by tests.
void applyConfigValue(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct SweepPoint {
  TrustModelKind model = TrustModelKind::TrustSense;
  AdversaryMode mode = AdversaryMode::Static;
  double fraction = 0.0;
  double accuracyMean = 0.0;
  double accuracyStd = 0.0;
  double pathLengthMean = 0.0;
  double pathLengthStd = 0.0;
  double energyMean = 0.0;
  double energyStd = 0.0;
  double score = 0.0;
  std::vector<MetricsRecord> runs;  // in seed order
};

struct ModelAverage {
  TrustModelKind model = TrustModelKind::TrustSense;
  AdversaryMode mode = AdversaryMode::Static;
  double score = 0.0;  // mean of point scores over fractions
};

struct SweepReport {
  std::vector<SweepPoint> points;  // ordered by model, then mode, then fraction
  std::vector<ModelAverage> averages;
  ScoreWeights weights;
  double eMax = 0.0;
  std::uint64_t baseSeed = 0;
  /// Modeling parameters needed to interpret the numbers (energy accounting etc.).
  std::vector<std::pair<std::string, std::string>> notes;
};

class SweepFailure : public std::runtime_error {
 public:
  SweepFailure(TrustModelKind model, AdversaryMode mode, double fraction, std::uint64_t seed,
               const std::string& what);
  TrustModelKind model;
  AdversaryMode mode;
  double fraction;
  std::uint64_t seed;
};

/// Mean and sample standard deviation (n - 1; zero for a single value).
std::pair<double, double> meanStd(const std::vector<double>& xs);

/// Progress callback: (points done, points total).
using SweepProgress = std::function<void(std::size_t, std::size_t)>;

/// Run index i uses seed baseSeed + i for both the topology and the run, so
/// every model and mode sees the same networks and adversary placements.
/// E_max is the largest point-mean energy, rounded up to eMaxRounding, so
/// scores can be recomputed from the CSV alone.
SweepReport runSweep(const ExperimentConfig& cfg, const SweepProgress& progress = {});

/// Fills score fields and averages from the aggregated points.
void scoreReport(SweepReport& report);

inline constexpr std::string_view kCsvHeader =
    "model,mode,fraction,accuracy_mean,accuracy_std,pathlen_mean,pathlen_std,energy_mean,energy_std,"
    "score";

std::string formatCsv(const SweepReport& report);
/// Throws std::runtime_error naming the path if it cannot be written.
void writeCsv(const SweepReport& report, const std::filesystem::path& path);
/// Points only (no per-run records); throws std::runtime_error on a bad header or row.
std::vector<SweepPoint> parseCsv(std::istream& in);

/// Sidecar `key=value` metadata: eMax, weights, seed, per-model averages,
/// and `note.*` modeling parameters.
std::string formatMeta(const SweepReport& report);
void parseMeta(std::istream& in, SweepReport& report);

TrustModelKind parseTrustModel(std::string_view s);
AdversaryMode parseAdversaryMode(std::string_view s);

}  // namespace trustsense
