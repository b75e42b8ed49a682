#include "trustsense/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "trustsense/rng.hpp"

namespace trustsense {

namespace {

std::string formatReal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parseReal(const std::string& token, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("topology line {}: bad number '{}'", line, token));
  }
  return v;
}

std::vector<Position> headGrid(std::size_t count, double fieldSize) {
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  const auto rows = (count + cols - 1) / cols;
  std::vector<Position> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto r = i / cols;
    const auto c = i % cols;
    out.push_back({(static_cast<double>(c) + 0.5) * fieldSize / static_cast<double>(cols),
                   (static_cast<double>(r) + 0.5) * fieldSize / static_cast<double>(rows)});
  }
  return out;
}

}  // namespace

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

UnregisteredNode::UnregisteredNode(NodeId id)
    : std::out_of_range(fmt::format("unregistered node {}", id.value)) {}

NetworkTopology::NetworkTopology(double fieldSize, double radioRange, std::vector<Node> nodes)
    : fieldSize_(fieldSize), radioRange_(radioRange), nodes_(std::move(nodes)) {
  if (!(fieldSize_ > 0.0) || !std::isfinite(fieldSize_)) {
    throw std::invalid_argument("topology: fieldSize must be positive");
  }
  if (!(radioRange_ > 0.0) || !std::isfinite(radioRange_)) {
    throw std::invalid_argument("topology: radioRange must be positive");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y) || n.position.x < 0.0 ||
        n.position.y < 0.0 || n.position.x > fieldSize_ || n.position.y > fieldSize_) {
      throw std::invalid_argument(fmt::format("topology: node {} outside field", n.id.value));
    }
    if (!index_.emplace(n.id.value, i).second) {
      throw std::invalid_argument(fmt::format("topology: duplicate node id {}", n.id.value));
    }
    (n.role == NodeRole::Sensor ? sensors_ : heads_).push_back(n.id);
  }
  if (heads_.empty()) throw std::invalid_argument("topology: at least one cluster-head required");
  std::sort(sensors_.begin(), sensors_.end());
  std::sort(heads_.begin(), heads_.end());

  clusterOf_.resize(nodes_.size());
  neighbors_.resize(nodes_.size());
  for (auto h : heads_) {
    clusterOf_[indexOf(h)] = h;
    members_[h.value];
  }
  for (auto s : sensors_) {
    const auto p = position(s);
    // Nearest head; ties go to the lower id because heads_ is sorted.
    NodeId best = heads_.front();
    double bestDist = std::numeric_limits<double>::infinity();
    for (auto h : heads_) {
      const double d = distance(p, position(h));
      if (d < bestDist) {
        bestDist = d;
        best = h;
      }
    }
    clusterOf_[indexOf(s)] = best;
    members_[best.value].push_back(s);
  }
  for (std::size_t a = 0; a < sensors_.size(); ++a) {
    for (std::size_t b = a + 1; b < sensors_.size(); ++b) {
      if (distance(position(sensors_[a]), position(sensors_[b])) < radioRange_) {
        neighbors_[indexOf(sensors_[a])].push_back(sensors_[b]);
        neighbors_[indexOf(sensors_[b])].push_back(sensors_[a]);
      }
    }
  }
  for (auto& adj : neighbors_) std::sort(adj.begin(), adj.end());
}

bool NetworkTopology::isClusterHead(NodeId id) const {
  return nodes_[indexOf(id)].role == NodeRole::ClusterHead;
}

Position NetworkTopology::position(NodeId id) const { return nodes_[indexOf(id)].position; }

std::size_t NetworkTopology::indexOf(NodeId id) const {
  auto it = index_.find(id.value);
  if (it == index_.end()) throw UnregisteredNode(id);
  return it->second;
}

NodeId NetworkTopology::clusterOf(NodeId sensor) const { return clusterOf_[indexOf(sensor)]; }

const std::vector<NodeId>& NetworkTopology::members(NodeId head) const {
  auto it = members_.find(head.value);
  if (it == members_.end()) throw UnregisteredNode(head);
  return it->second;
}

const std::vector<NodeId>& NetworkTopology::adjacency(NodeId id) const {
  return neighbors_[indexOf(id)];
}

const std::vector<NodeId>& NetworkTopology::neighbors(NodeId sensor) const {
  return adjacency(sensor);
}

DistanceMap NetworkTopology::distanceMap(NodeId sensor) const {
  const NodeId head = clusterOf(sensor);
  const Position hp = position(head);
  DistanceMap out;
  for (auto n : adjacency(sensor)) {
    if (clusterOf(n) == head) out.push_back({n, distance(position(n), hp)});
  }
  return out;
}

double NetworkTopology::distanceToHead(NodeId sensor) const {
  return distance(position(sensor), position(clusterOf(sensor)));
}

bool NetworkTopology::headInRange(NodeId sensor) const {
  return distanceToHead(sensor) < radioRange_;
}

bool NetworkTopology::inRange(NodeId a, NodeId b) const {
  return distance(position(a), position(b)) < radioRange_;
}

bool operator==(const NetworkTopology& a, const NetworkTopology& b) {
  if (a.fieldSize_ != b.fieldSize_ || a.radioRange_ != b.radioRange_) return false;
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.id != y.id || x.role != y.role || !(x.position == y.position)) return false;
  }
  return true;
}

bool greedilyRoutable(const NetworkTopology& topo, NodeId sensor) {
  if (topo.headInRange(sensor)) return true;
  const double own = topo.distanceToHead(sensor);
  for (const auto& n : topo.distanceMap(sensor)) {
    if (n.distanceToHead < own) return true;
  }
  return false;
}

NetworkTopology generateTopology(const TopologyConfig& config, std::uint64_t rngSeed) {
  if (config.sensorCount < 1) throw std::invalid_argument("generateTopology: sensorCount must be >= 1");
  if (config.clusterHeadCount < 1) {
    throw std::invalid_argument("generateTopology: clusterHeadCount must be >= 1");
  }
  if (!(config.radioRange > 0.0)) throw std::invalid_argument("generateTopology: radioRange must be > 0");
  if (!(config.fieldSize > 0.0)) throw std::invalid_argument("generateTopology: fieldSize must be > 0");

  Rng rng(rngSeed, /*stream=*/0x70706f);
  const double f = config.fieldSize;
  std::vector<Node> nodes;
  nodes.reserve(config.sensorCount + config.clusterHeadCount);
  for (std::size_t i = 0; i < config.sensorCount; ++i) {
    nodes.push_back({NodeId{static_cast<std::uint32_t>(i)}, {rng.uniform(0, f), rng.uniform(0, f)},
                     NodeRole::Sensor});
  }
  const auto grid = headGrid(config.clusterHeadCount, f);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    nodes.push_back({NodeId{static_cast<std::uint32_t>(config.sensorCount + i)}, grid[i],
                     NodeRole::ClusterHead});
  }

  std::vector<std::size_t> redraws(config.sensorCount, 0);
  while (true) {
    NetworkTopology topo(f, config.radioRange, nodes);
    auto stuck = std::find_if(topo.sensors().begin(), topo.sensors().end(),
                              [&](NodeId s) { return !greedilyRoutable(topo, s); });
    if (stuck == topo.sensors().end()) return topo;
    const auto idx = topo.indexOf(*stuck);
    if (++redraws[idx] > config.maxResamplesPerSensor) {
      throw UnconnectableTopology(fmt::format(
          "unconnectable topology: sensor {} cannot reach a cluster-head after {} redraws "
          "(radioRange {} too small for the field?)",
          stuck->value, config.maxResamplesPerSensor, config.radioRange));
    }
    nodes[idx].position = {rng.uniform(0, f), rng.uniform(0, f)};
  }
}

std::vector<NodeId> spatialNeighbors(const NetworkTopology& topo, NodeId x) {
  if (!topo.contains(x)) throw UnregisteredNode(x);
  if (topo.isClusterHead(x)) return {};
  return topo.neighbors(x);
}

void writeTopology(std::ostream& out, const NetworkTopology& topo) {
  out << "topology v1 " << formatReal(topo.fieldSize()) << ' ' << formatReal(topo.radioRange())
      << '\n';
  for (const auto& n : topo.nodes()) {
    out << (n.role == NodeRole::Sensor ? 'S' : 'H') << ' ' << n.id.value << ' '
        << formatReal(n.position.x) << ' ' << formatReal(n.position.y) << '\n';
  }
}

std::string formatTopology(const NetworkTopology& topo) {
  std::ostringstream os;
  writeTopology(os, topo);
  return os.str();
}

NetworkTopology parseTopology(std::istream& in) {
  std::string line;
  std::size_t lineNo = 0;
  double fieldSize = 0.0;
  double radioRange = 0.0;
  bool haveHeader = false;
  std::vector<Node> nodes;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (!haveHeader) {
      if (tok.size() != 4 || tok[0] != "topology" || tok[1] != "v1") {
        throw std::invalid_argument("topology: expected header 'topology v1 <fieldSize> <radioRange>'");
      }
      fieldSize = parseReal(tok[2], lineNo);
      radioRange = parseReal(tok[3], lineNo);
      haveHeader = true;
      continue;
    }
    if (tok.size() != 4 || (tok[0] != "S" && tok[0] != "H")) {
      throw std::invalid_argument(fmt::format("topology line {}: expected 'S|H <id> <x> <y>'", lineNo));
    }
    std::uint32_t id = 0;
    auto [ptr, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), id);
    if (ec != std::errc{} || ptr != tok[1].data() + tok[1].size()) {
      throw std::invalid_argument(fmt::format("topology line {}: bad id '{}'", lineNo, tok[1]));
    }
    nodes.push_back({NodeId{id}, {parseReal(tok[2], lineNo), parseReal(tok[3], lineNo)},
                     tok[0] == "S" ? NodeRole::Sensor : NodeRole::ClusterHead});
  }
  if (!haveHeader) throw std::invalid_argument("topology: empty input");
  return NetworkTopology(fieldSize, radioRange, std::move(nodes));
}

NetworkTopology parseTopology(const std::string& text) {
  std::istringstream is(text);
  return parseTopology(is);
}

}  // namespace trustsense
