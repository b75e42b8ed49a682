#include "trustsense/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace trustsense {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> splitList(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double toDouble(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
  return out;
}

std::uint64_t toUnsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) {
    throw ConfigError(fmt::format("{}: expected a nonnegative integer, got '{}'", key, v));
  }
  return out;
}

int toInt(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
  return out;
}

DropMode toDropMode(const std::string& key, const std::string& v) {
  if (v == "none") return DropMode::None;
  if (v == "full") return DropMode::Full;
  if (v == "selective") return DropMode::Selective;
  throw ConfigError(fmt::format("{}: expected none|full|selective, got '{}'", key, v));
}

FalsifyMode toFalsifyMode(const std::string& key, const std::string& v) {
  if (v == "none") return FalsifyMode::None;
  if (v == "offset") return FalsifyMode::Offset;
  if (v == "random") return FalsifyMode::Random;
  throw ConfigError(fmt::format("{}: expected none|offset|random, got '{}'", key, v));
}

template <typename T, typename F>
std::vector<T> toList(const std::string& v, F&& one) {
  std::vector<T> out;
  for (const auto& item : splitList(v)) {
    if (item.empty()) continue;
    out.push_back(one(item));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto dbl = [&t](const char* name, auto member) {
      t[name] = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
        member(c) = toDouble(k, v);
      };
    };

    // network / run
    t["sensorCount"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.topology.sensorCount = c.run.sensorCount = toUnsigned(k, v);
    };
    t["clusterHeadCount"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.topology.clusterHeadCount = c.run.clusterHeadCount = toUnsigned(k, v);
    };
    dbl("fieldSize", [](ExperimentConfig& c) -> double& { return c.topology.fieldSize; });
    dbl("radioRange", [](ExperimentConfig& c) -> double& { return c.topology.radioRange; });
    t["maxResamplesPerSensor"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.topology.maxResamplesPerSensor = toUnsigned(k, v);
    };
    dbl("maliciousFraction", [](ExperimentConfig& c) -> double& { return c.run.maliciousFraction; });
    t["rounds"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.rounds = toUnsigned(k, v);
    };
    t["rngSeed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.rngSeed = toUnsigned(k, v);
    };
    t["trustModel"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      try {
        c.run.trustModel = parseTrustModel(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", k, e.what()));
      }
    };
    dbl("energyPerUnitDistance", [](ExperimentConfig& c) -> double& { return c.run.energyPerUnitDistance; });
    dbl("multicastCost", [](ExperimentConfig& c) -> double& { return c.run.multicastCost; });
    dbl("fieldBase", [](ExperimentConfig& c) -> double& { return c.run.field.base; });
    dbl("fieldGradient", [](ExperimentConfig& c) -> double& { return c.run.field.gradient; });
    dbl("eigentrustPreTrustWeight", [](ExperimentConfig& c) -> double& { return c.run.eigentrust.preTrustWeight; });
    dbl("eigentrustEpsilon", [](ExperimentConfig& c) -> double& { return c.run.eigentrust.epsilon; });
    t["eigentrustQueryModel"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v == "flood") {
        c.run.eigentrust.queryModel = QueryModel::Flood;
      } else if (v == "head") {
        c.run.eigentrust.queryModel = QueryModel::Head;
      } else {
        throw ConfigError(fmt::format("{}: expected flood|head, got '{}'", k, v));
      }
    };
    t["eigentrustMaxIterations"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.eigentrust.maxIterations = toUnsigned(k, v);
    };

    // protocol constants
    dbl("relayRewardRate", [](ExperimentConfig& c) -> double& { return c.run.protocol.relayRewardRate; });
    dbl("consistencyRewardRate", [](ExperimentConfig& c) -> double& { return c.run.protocol.consistencyRewardRate; });
    dbl("packetLossPunishRate", [](ExperimentConfig& c) -> double& { return c.run.protocol.packetLossPunishRate; });
    dbl("outlierPunishRate", [](ExperimentConfig& c) -> double& { return c.run.protocol.outlierPunishRate; });
    t["maxOutlierSequence"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.protocol.maxOutlierSequence = toInt(k, v);
    };
    t["maxClusterSize"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.protocol.maxClusterSize = toUnsigned(k, v);
    };
    dbl("outlierThreshold", [](ExperimentConfig& c) -> double& { return c.run.protocol.outlierThreshold; });
    dbl("spatialPresenceStep", [](ExperimentConfig& c) -> double& { return c.run.protocol.spatialPresenceStep; });
    t["trustUpdatePeriod"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.protocol.trustUpdatePeriod = toInt(k, v);
    };
    t["bundlingWindow"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.protocol.bundlingWindow = toInt(k, v);
    };
    dbl("goodThreshold", [](ExperimentConfig& c) -> double& { return c.run.protocol.thresholds.good; });
    dbl("mediumThreshold", [](ExperimentConfig& c) -> double& { return c.run.protocol.thresholds.medium; });

    // adversary
    t["dropMode"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.adversary.dropMode = toDropMode(k, v);
    };
    dbl("dropProbability", [](ExperimentConfig& c) -> double& { return c.run.adversary.dropProbability; });
    t["falsifyMode"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.adversary.falsify = toFalsifyMode(k, v);
    };
    dbl("falsifyAmount", [](ExperimentConfig& c) -> double& { return c.run.adversary.falsifyAmount; });
    t["adversaryMode"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      try {
        c.run.adversary.oscillation = parseAdversaryMode(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", k, e.what()));
      }
    };
    t["togglePeriod"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.run.adversary.togglePeriod = toInt(k, v);
    };
    t["dropOwnPackets"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "true" && v != "false") throw ConfigError(fmt::format("{}: expected true|false, got '{}'", k, v));
      c.run.adversary.dropOwnPackets = v == "true";
    };
    dbl("toggleProbability", [](ExperimentConfig& c) -> double& { return c.run.adversary.toggleProbability; });

    // score weights
    dbl("wA", [](ExperimentConfig& c) -> double& { return c.weights.wA; });
    dbl("wP", [](ExperimentConfig& c) -> double& { return c.weights.wP; });
    dbl("wE", [](ExperimentConfig& c) -> double& { return c.weights.wE; });
    dbl("aMax", [](ExperimentConfig& c) -> double& { return c.weights.aMax; });
    t["pMax"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.weights.pMax = toDouble(k, v);
      c.pMaxExplicit = true;
    };
    dbl("eMaxRounding", [](ExperimentConfig& c) -> double& { return c.weights.eMaxRounding; });

    // sweep
    t["fractions"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.sweep.fractions = toList<double>(v, [&](const std::string& s) { return toDouble(k, s); });
    };
    t["runsPerPoint"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.sweep.runsPerPoint = toUnsigned(k, v);
    };
    t["adversaryModes"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.sweep.adversaryModes = toList<AdversaryMode>(v, [&](const std::string& s) {
        try {
          return parseAdversaryMode(s);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(fmt::format("{}: {}", k, e.what()));
        }
      });
    };
    t["models"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.sweep.models = toList<TrustModelKind>(v, [&](const std::string& s) {
        try {
          return parseTrustModel(s);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(fmt::format("{}: {}", k, e.what()));
        }
      });
    };
    t["baseSeed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.sweep.baseSeed = toUnsigned(k, v);
    };
    return t;
  }();
  return table;
}

double parseCell(const std::string& s, std::size_t line) {
  double out = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc{} || p != end) throw std::runtime_error(fmt::format("csv line {}: bad number '{}'", line, s));
  return out;
}

}  // namespace

TrustModelKind parseTrustModel(std::string_view s) {
  if (s == "trustsense") return TrustModelKind::TrustSense;
  if (s == "eigentrust") return TrustModelKind::EigenTrust;
  throw std::invalid_argument(fmt::format("unknown trust model '{}'", s));
}

AdversaryMode parseAdversaryMode(std::string_view s) {
  if (s == "static") return AdversaryMode::Static;
  if (s == "oscillating") return AdversaryMode::Oscillating;
  throw std::invalid_argument(fmt::format("unknown adversary mode '{}'", s));
}

void SweepSpec::validate() const {
  if (runsPerPoint < 1) throw std::invalid_argument("runsPerPoint must be >= 1");
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument(fmt::format("fraction {} outside [0,1]", f));
  }
}

ScoreWeights ExperimentConfig::effectiveWeights() const {
  ScoreWeights w = weights;
  if (!pMaxExplicit) w.pMax = static_cast<double>(run.sensorCount);
  return w;
}

void applyConfigValue(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& t = setters();
  auto it = t.find(key);
  if (it == t.end()) throw ConfigError(fmt::format("unknown key '{}'", key));
  it->second(cfg, key, value);
}

ExperimentConfig parseConfig(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineNo));
    try {
      applyConfigValue(base, trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineNo, e.what()));
    }
  }
  return base;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  try {
    return parseConfig(in);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

SweepFailure::SweepFailure(TrustModelKind model_, AdversaryMode mode_, double fraction_,
                           std::uint64_t seed_, const std::string& what)
    : std::runtime_error(fmt::format("run failed (model={}, mode={}, fraction={}, seed={}): {}",
                                     toString(model_), toString(mode_), fraction_, seed_, what)),
      model(model_),
      mode(mode_),
      fraction(fraction_),
      seed(seed_) {}

std::pair<double, double> meanStd(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

SweepReport runSweep(const ExperimentConfig& cfg, const SweepProgress& progress) {
  cfg.sweep.validate();
  SweepReport report;
  report.weights = cfg.effectiveWeights();
  report.weights.validate();
  report.baseSeed = cfg.sweep.baseSeed;
  report.notes = {
      {"sensorCount", std::to_string(cfg.run.sensorCount)},
      {"clusterHeadCount", std::to_string(cfg.run.clusterHeadCount)},
      {"rounds", std::to_string(cfg.run.rounds)},
      {"runsPerPoint", std::to_string(cfg.sweep.runsPerPoint)},
      {"energyPerUnitDistance", fmt::format("{}", cfg.run.energyPerUnitDistance)},
      {"energyModel", "sensor transmit energy = energyPerUnitDistance * hop distance; heads excluded"},
      {"eigentrustQueryModel", std::string(toString(cfg.run.eigentrust.queryModel))},
      {"eigentrustQueryCost", cfg.run.eigentrust.queryModel == QueryModel::Flood
                                  ? "one query per nonzero ledger row per update; every reachable sensor rebroadcasts at its broadcast reach"
                                  : "one query per nonzero ledger row per update; querier transmits its distance to head"},
      {"bundlingWindow", std::to_string(cfg.run.protocol.bundlingWindow)},
      {"dropOwnPackets", cfg.run.adversary.dropOwnPackets ? "true" : "false"},
  };

  // Topologies are shared by every (model, mode, fraction) at the same run index.
  std::vector<NetworkTopology> topologies;
  topologies.reserve(cfg.sweep.runsPerPoint);
  for (std::size_t i = 0; i < cfg.sweep.runsPerPoint; ++i) {
    topologies.push_back(generateTopology(cfg.topology, cfg.sweep.baseSeed + i));
  }

  const std::size_t total = cfg.sweep.models.size() * cfg.sweep.adversaryModes.size() * cfg.sweep.fractions.size();
  for (auto model : cfg.sweep.models) {
    for (auto mode : cfg.sweep.adversaryModes) {
      for (double fraction : cfg.sweep.fractions) {
        SweepPoint point;
        point.model = model;
        point.mode = mode;
        point.fraction = fraction;
        std::vector<double> acc, path, energy;
        for (std::size_t i = 0; i < cfg.sweep.runsPerPoint; ++i) {
          RunConfig rc = cfg.run;
          rc.trustModel = model;
          rc.adversary.oscillation = mode;
          rc.maliciousFraction = fraction;
          rc.rngSeed = cfg.sweep.baseSeed + i;
          try {
            point.runs.push_back(runSimulation(rc, topologies[i]));
          } catch (const std::exception& e) {
            throw SweepFailure(model, mode, fraction, rc.rngSeed, e.what());
          }
          const auto& m = point.runs.back();
          acc.push_back(m.accuracy);
          path.push_back(m.avgPathLength);
          energy.push_back(m.energy);
        }
        std::tie(point.accuracyMean, point.accuracyStd) = meanStd(acc);
        std::tie(point.pathLengthMean, point.pathLengthStd) = meanStd(path);
        std::tie(point.energyMean, point.energyStd) = meanStd(energy);
        report.points.push_back(std::move(point));
        if (progress) progress(report.points.size(), total);
      }
    }
  }

  double maxEnergy = 0.0;
  for (const auto& p : report.points) maxEnergy = std::max(maxEnergy, p.energyMean);
  report.eMax = roundUpEnergyMax(maxEnergy, report.weights.eMaxRounding);
  scoreReport(report);
  return report;
}

void scoreReport(SweepReport& report) {
  report.averages.clear();
  for (auto& p : report.points) {
    MetricsRecord m;
    m.accuracy = p.accuracyMean;
    m.avgPathLength = p.pathLengthMean;
    m.energy = p.energyMean;
    p.score = tradeoffScore(m, report.weights, report.eMax);
  }
  for (const auto& p : report.points) {
    auto it = std::find_if(report.averages.begin(), report.averages.end(), [&](const ModelAverage& a) {
      return a.model == p.model && a.mode == p.mode;
    });
    if (it == report.averages.end()) {
      report.averages.push_back({p.model, p.mode, 0.0});
    }
  }
  for (auto& a : report.averages) {
    std::vector<double> scores;
    for (const auto& p : report.points) {
      if (p.model == a.model && p.mode == a.mode) scores.push_back(p.score);
    }
    a.score = meanStd(scores).first;
  }
}

std::string formatCsv(const SweepReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& p : report.points) {
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", toString(p.model),
                       toString(p.mode), p.fraction, p.accuracyMean, p.accuracyStd, p.pathLengthMean,
                       p.pathLengthStd, p.energyMean, p.energyStd, p.score);
  }
  return out;
}

void writeCsv(const SweepReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << formatCsv(report);
  out.flush();
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

std::vector<SweepPoint> parseCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<SweepPoint> points;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    const auto cells = splitList(line);
    if (cells.size() != 10) throw std::runtime_error(fmt::format("csv line {}: expected 10 fields", lineNo));
    SweepPoint p;
    try {
      p.model = parseTrustModel(cells[0]);
      p.mode = parseAdversaryMode(cells[1]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(fmt::format("csv line {}: {}", lineNo, e.what()));
    }
    p.fraction = parseCell(cells[2], lineNo);
    p.accuracyMean = parseCell(cells[3], lineNo);
    p.accuracyStd = parseCell(cells[4], lineNo);
    p.pathLengthMean = parseCell(cells[5], lineNo);
    p.pathLengthStd = parseCell(cells[6], lineNo);
    p.energyMean = parseCell(cells[7], lineNo);
    p.energyStd = parseCell(cells[8], lineNo);
    p.score = parseCell(cells[9], lineNo);
    points.push_back(std::move(p));
  }
  return points;
}

std::string formatMeta(const SweepReport& report) {
  const auto& w = report.weights;
  std::string out = fmt::format("eMax={}\nwA={}\nwP={}\nwE={}\naMax={}\npMax={}\neMaxRounding={}\nbaseSeed={}\n",
                                report.eMax, w.wA, w.wP, w.wE, w.aMax, w.pMax, w.eMaxRounding, report.baseSeed);
  for (const auto& a : report.averages) {
    out += fmt::format("average.{}.{}={:.6f}\n", toString(a.model), toString(a.mode), a.score);
  }
  for (const auto& [k, v] : report.notes) out += fmt::format("note.{}={}\n", k, v);
  return out;
}

void parseMeta(std::istream& in, SweepReport& report) {
  std::string line;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::runtime_error(fmt::format("meta: bad line '{}'", text));
    const auto key = text.substr(0, eq);
    const auto value = text.substr(eq + 1);
    auto& w = report.weights;
    if (key.rfind("average.", 0) == 0) continue;  // recomputed
    if (key.rfind("note.", 0) == 0) {
      report.notes.emplace_back(key.substr(5), value);
      continue;
    }
    if (key == "baseSeed") {
      report.baseSeed = toUnsigned(key, value);
      continue;
    }
    const double v = toDouble(key, value);
    if (key == "eMax") report.eMax = v;
    else if (key == "wA") w.wA = v;
    else if (key == "wP") w.wP = v;
    else if (key == "wE") w.wE = v;
    else if (key == "aMax") w.aMax = v;
    else if (key == "pMax") w.pMax = v;
    else if (key == "eMaxRounding") w.eMaxRounding = v;
    else throw std::runtime_error(fmt::format("meta: unknown key '{}'", key));
  }
}

}  // namespace trustsense
