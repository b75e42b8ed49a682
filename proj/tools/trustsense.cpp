// trustsense: single runs, threat-level sweeps, score recomputation and
// topology generation for the clustered WSN trust simulator.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "trustsense/engine.hpp"
#include "trustsense/experiment.hpp"
#include "trustsense/models.hpp"
#include "trustsense/topology.hpp"

namespace ts = trustsense;

namespace {

struct Globals {
  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool verbose = false;
};

ts::ExperimentConfig loadGlobals(const Globals& g) {
  ts::ExperimentConfig cfg = g.configPath.empty() ? ts::ExperimentConfig{} : ts::loadConfig(g.configPath);
  if (g.seed) {
    cfg.run.rngSeed = *g.seed;
    cfg.sweep.baseSeed = *g.seed;
  }
  return cfg;
}

std::ofstream openOut(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  return f;
}

ts::NetworkTopology loadTopology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open topology '{}'", path));
  return ts::parseTopology(in);
}

std::string formatMetrics(const ts::MetricsRecord& m) {
  return fmt::format(
      "accuracy={:.6f}\navg_path_length={:.6f}\nenergy={:.6f}\nhead_energy={:.6f}\n"
      "blacklist_true_positives={}\nblacklist_false_positives={}\nmalicious_sensors={}\n"
      "benevolent_sensors={}\nbenevolent_packets={}\nbenevolent_delivered={}\ndeliveries={}\n"
      "punishments={}\nrewards={}\nincidents={}\n",
      m.accuracy, m.avgPathLength, m.energy, m.headEnergy, m.blacklistTruePositives,
      m.blacklistFalsePositives, m.maliciousSensors, m.benevolentSensors, m.benevolentPackets,
      m.benevolentDelivered, m.deliveries, m.punishments, m.rewards, m.incidents);
}

// Collects cluster-head incidents once the run finishes.
class IncidentDump : public ts::RunObserver {
 public:
  explicit IncidentDump(std::ostream& out) : out_(out) {}
  void onRunEnd(const ts::TrustModel& model) override {
    out_ << "round,nodeId,expected,actual,deviation\n";
    const auto* tsm = dynamic_cast<const ts::TrustSenseModel*>(&model);
    if (tsm == nullptr) return;
    std::vector<ts::Incident> all;
    for (const auto& h : tsm->heads()) all.insert(all.end(), h.incidents().begin(), h.incidents().end());
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.round != b.round ? a.round < b.round : a.node < b.node;
    });
    for (const auto& i : all) {
      out_ << fmt::format("{},{},{},{},{}\n", i.round, i.node.value, i.expected, i.actual, i.deviation);
    }
  }

 private:
  std::ostream& out_;
};

class Fanout : public ts::RunObserver {
 public:
  void add(ts::RunObserver* o) { targets_.push_back(o); }
  void onRoundStart(std::uint64_t r, const ts::AdversaryState& a) override {
    for (auto* t : targets_) t->onRoundStart(r, a);
  }
  void onDataPacket(std::uint64_t r, const ts::Packet& p, bool d) override {
    for (auto* t : targets_) t->onDataPacket(r, p, d);
  }
  void onRegistration(std::uint64_t r, ts::NodeId n, const ts::FloodResult& f,
                      std::optional<ts::RegistrationOutcome> o) override {
    for (auto* t : targets_) t->onRegistration(r, n, f, o);
  }
  void onTransmission(std::uint64_t r, ts::PacketKind k, ts::NodeId s, double d) override {
    for (auto* t : targets_) t->onTransmission(r, k, s, d);
  }
  void onRunEnd(const ts::TrustModel& m) override {
    for (auto* t : targets_) t->onRunEnd(m);
  }

 private:
  std::vector<ts::RunObserver*> targets_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered WSN trust simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.configPath, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (run seed, and sweep base seed)");
  app.add_option("--out", g.out, "output path");
  app.add_flag("--verbose", g.verbose, "log more detail");

  // run
  auto* run = app.add_subcommand("run", "single simulation; prints the metrics record");
  std::string runModel, runMode, topoIn, eventsPath, incidentsPath;
  std::optional<double> runFraction;
  std::optional<std::uint64_t> runRounds;
  run->add_option("--model", runModel, "trustsense | eigentrust");
  run->add_option("--mode", runMode, "static | oscillating");
  run->add_option("--fraction", runFraction, "malicious fraction in [0,1]");
  run->add_option("--rounds", runRounds, "data rounds");
  run->add_option("--topology", topoIn, "topology file instead of generating one");
  run->add_option("--events", eventsPath, "write the per-packet event log here");
  run->add_option("--incidents", incidentsPath, "write the incident log here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "threat-level sweep; writes CSV (+ .meta sidecar)");
  std::optional<std::size_t> sweepRuns;
  sweep->add_option("--runs", sweepRuns, "runs per point");

  // score
  auto* score = app.add_subcommand("score", "recompute trade-off scores from a sweep CSV");
  std::string scoreCsv, scoreMeta;
  score->add_option("csv", scoreCsv, "sweep CSV")->required()->check(CLI::ExistingFile);
  score->add_option("--meta", scoreMeta, "metadata sidecar (default: <csv>.meta if present)");

  // topo
  auto* topo = app.add_subcommand("topo", "generate or inspect a topology");
  std::string inspectPath;
  topo->add_option("--inspect", inspectPath, "summarize an existing topology file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = loadGlobals(g);

    if (*run) {
      if (!runModel.empty()) cfg.run.trustModel = ts::parseTrustModel(runModel);
      if (!runMode.empty()) cfg.run.adversary.oscillation = ts::parseAdversaryMode(runMode);
      if (runFraction) cfg.run.maliciousFraction = *runFraction;
      if (runRounds) cfg.run.rounds = *runRounds;
      const auto network = topoIn.empty() ? ts::generateTopology(cfg.topology, cfg.run.rngSeed) : loadTopology(topoIn);

      Fanout fan;
      std::ofstream eventsFile, incidentsFile;
      std::optional<ts::EventLogWriter> events;
      std::optional<IncidentDump> incidents;
      if (!eventsPath.empty()) {
        eventsFile = openOut(eventsPath);
        fan.add(&events.emplace(eventsFile, true, g.verbose));
      }
      if (!incidentsPath.empty()) {
        incidentsFile = openOut(incidentsPath);
        fan.add(&incidents.emplace(incidentsFile));
      }
      const auto m = ts::runSimulation(cfg.run, network, &fan);
      const auto text = fmt::format("model={}\nmode={}\nfraction={}\nseed={}\n{}", ts::toString(cfg.run.trustModel),
                                    ts::toString(cfg.run.adversaryMode()), cfg.run.maliciousFraction,
                                    cfg.run.rngSeed, formatMetrics(m));
      if (g.out.empty()) {
        std::cout << text;
      } else {
        openOut(g.out) << text;
      }
      return 0;
    }

    if (*sweep) {
      if (sweepRuns) cfg.sweep.runsPerPoint = *sweepRuns;
      const std::string csvPath = g.out.empty() ? "sweep.csv" : g.out;
      const auto start = std::chrono::steady_clock::now();
      const auto report = ts::runSweep(cfg, [&](std::size_t done, std::size_t total) {
        if (g.verbose) fmt::print(stderr, "point {}/{}\n", done, total);
      });
      ts::writeCsv(report, csvPath);
      openOut(csvPath + ".meta") << ts::formatMeta(report);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      fmt::print("wrote {} ({} points, eMax={}, {:.1f}s)\n", csvPath, report.points.size(), report.eMax, secs);
      for (const auto& a : report.averages) {
        fmt::print("average score {} {}: {:.4f}\n", ts::toString(a.model), ts::toString(a.mode), a.score);
      }
      return 0;
    }

    if (*score) {
      std::ifstream in(scoreCsv);
      ts::SweepReport report;
      report.points = ts::parseCsv(in);
      report.weights = cfg.effectiveWeights();
      const std::string metaPath = scoreMeta.empty() ? scoreCsv + ".meta" : scoreMeta;
      if (std::ifstream meta(metaPath); meta) {
        ts::parseMeta(meta, report);
      } else {
        if (!scoreMeta.empty()) throw std::runtime_error(fmt::format("cannot open '{}'", scoreMeta));
        double maxEnergy = 0.0;
        for (const auto& p : report.points) maxEnergy = std::max(maxEnergy, p.energyMean);
        report.eMax = ts::roundUpEnergyMax(maxEnergy, report.weights.eMaxRounding);
      }
      ts::scoreReport(report);
      const auto csv = ts::formatCsv(report);
      if (!g.out.empty()) {
        openOut(g.out) << csv;
      } else if (g.verbose) {
        std::cout << csv;
      }
      fmt::print("eMax={}\n", report.eMax);
      for (const auto& a : report.averages) {
        fmt::print("average score {} {}: {:.4f}\n", ts::toString(a.model), ts::toString(a.mode), a.score);
      }
      return 0;
    }

    if (*topo) {
      const auto network = inspectPath.empty() ? ts::generateTopology(cfg.topology, cfg.run.rngSeed)
                                               : loadTopology(inspectPath);
      if (inspectPath.empty()) {
        if (g.out.empty()) {
          ts::writeTopology(std::cout, network);
        } else {
          auto f = openOut(g.out);
          ts::writeTopology(f, network);
        }
      }
      if (!inspectPath.empty() || g.verbose) {
        std::size_t direct = 0, links = 0;
        for (auto s : network.sensors()) {
          direct += network.headInRange(s) ? 1 : 0;
          links += network.neighbors(s).size();
        }
        auto& os = inspectPath.empty() ? std::cerr : std::cout;
        fmt::print(os, "sensors={} heads={} field={} range={} direct_to_head={} mean_degree={:.3f}\n",
                   network.sensors().size(), network.clusterHeads().size(), network.fieldSize(),
                   network.radioRange(), direct,
                   static_cast<double>(links) / static_cast<double>(network.sensors().size()));
        for (auto h : network.clusterHeads()) {
          fmt::print(os, "head {} members={}\n", h.value, network.members(h).size());
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
