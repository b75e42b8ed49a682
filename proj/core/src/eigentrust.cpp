#include "trustsense/eigentrust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trustsense {

InteractionLedger::Counts InteractionLedger::counts(NodeId rater, NodeId ratee) const {
  auto r = rows_.find(rater);
  if (r == rows_.end()) return {};
  auto c = r->second.find(ratee);
  return c == r->second.end() ? Counts{} : c->second;
}

std::size_t InteractionLedger::nonzeroRows() const {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](const auto& row) {
    return std::any_of(row.second.begin(), row.second.end(),
                       [](const auto& c) { return c.second.sat + c.second.unsat > 0; });
  }));
}

TrustMatrix TrustMatrix::fromDense(const std::vector<std::vector<double>>& rows) {
  TrustMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("TrustMatrix: rows must be square");
    std::vector<std::pair<std::size_t, double>> entries;
    double sum = 0.0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] < 0.0) throw std::invalid_argument("TrustMatrix: negative entry");
      sum += rows[i][j];
      if (rows[i][j] > 0.0) entries.emplace_back(j, rows[i][j]);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("TrustMatrix: row is not stochastic");
    m.setRow(i, std::move(entries));
  }
  return m;
}

void TrustMatrix::setRow(std::size_t i, std::vector<std::pair<std::size_t, double>> entries) {
  for (const auto& [j, v] : entries) {
    if (j >= rows_.size()) throw std::out_of_range("TrustMatrix: column out of range");
    if (v < 0.0) throw std::invalid_argument("TrustMatrix: negative entry");
  }
  rows_.at(i) = std::move(entries);
}

void TrustMatrix::setPreTrustWeight(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("pre-trust weight must be in [0,1]");
  preTrust_ = a;
}

double TrustMatrix::at(std::size_t i, std::size_t j) const {
  const double uniform = 1.0 / static_cast<double>(rows_.size());
  double base = 0.0;
  if (rows_.at(i).empty()) {
    base = uniform;
  } else {
    for (const auto& [col, v] : rows_[i]) {
      if (col == j) base += v;
    }
  }
  return (1.0 - preTrust_) * base + preTrust_ * uniform;
}

std::vector<double> TrustMatrix::leftMultiply(std::span<const double> t) const {
  const std::size_t n = rows_.size();
  if (t.size() != n) throw std::invalid_argument("TrustMatrix: vector size mismatch");
  std::vector<double> out(n, 0.0);
  double uniformMass = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += t[i];
    if (rows_[i].empty()) {
      uniformMass += t[i];
      continue;
    }
    for (const auto& [j, v] : rows_[i]) out[j] += t[i] * v;
  }
  const double spread = ((1.0 - preTrust_) * uniformMass + preTrust_ * total) / static_cast<double>(n);
  for (auto& v : out) v = (1.0 - preTrust_) * v + spread;
  return out;
}

TrustMatrix localTrustMatrix(const InteractionLedger& ledger, std::span<const NodeId> peers) {
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < peers.size(); ++i) index.emplace(peers[i], i);

  TrustMatrix m(peers.size());
  for (const auto& [rater, row] : ledger.rows()) {
    auto ri = index.find(rater);
    if (ri == index.end()) continue;
    std::vector<std::pair<std::size_t, double>> entries;
    double sum = 0.0;
    for (const auto& [ratee, c] : row) {
      auto ci = index.find(ratee);
      if (ci == index.end()) continue;
      const auto s = static_cast<double>(c.sat) - static_cast<double>(c.unsat);
      if (s > 0.0) {
        entries.emplace_back(ci->second, s);
        sum += s;
      }
    }
    if (sum <= 0.0) continue;  // falls back to the uniform row
    for (auto& e : entries) e.second /= sum;
    m.setRow(ri->second, std::move(entries));
  }
  return m;
}

double TrustVector::of(NodeId id) const {
  auto it = std::lower_bound(peers.begin(), peers.end(), id);
  if (it == peers.end() || *it != id) return 0.0;
  return values[static_cast<std::size_t>(it - peers.begin())];
}

GlobalTrustResult computeGlobalTrust(const TrustMatrix& c, double epsilon, std::size_t maxIters) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("computeGlobalTrust: epsilon must be > 0");
  const std::size_t n = c.size();
  GlobalTrustResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  r.trust.assign(n, 1.0 / static_cast<double>(n));
  while (r.iterations < maxIters) {
    auto next = c.leftMultiply(r.trust);
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    for (auto& v : next) v /= sum;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - r.trust[i]));
    r.trust = std::move(next);
    ++r.iterations;
    if (change < epsilon) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::optional<NodeId> eigentrustSelectLink(std::span<const NeighborDistance> neighbors,
                                           double ownDistanceToHead, const TrustVector& trust) {
  std::optional<NodeId> best;
  double bestTrust = -1.0;
  for (const auto& n : neighbors) {
    if (n.distanceToHead > ownDistanceToHead) continue;
    const double t = trust.of(n.id);
    if (!best || t > bestTrust || (t == bestTrust && n.id < *best)) {
      best = n.id;
      bestTrust = t;
    }
  }
  return best;
}

}  // namespace trustsense
