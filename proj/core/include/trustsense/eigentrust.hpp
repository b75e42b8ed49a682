#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trustsense/topology.hpp"

namespace trustsense {

/// Satisfactory / unsatisfactory interaction counts, rater -> ratee.
class InteractionLedger {
 public:
  struct Counts {
    std::uint64_t sat = 0;
    std::uint64_t unsat = 0;
  };

  void recordSatisfied(NodeId rater, NodeId ratee) { ++rows_[rater][ratee].sat; }
  void recordUnsatisfied(NodeId rater, NodeId ratee) { ++rows_[rater][ratee].unsat; }

  Counts counts(NodeId rater, NodeId ratee) const;
  const std::map<NodeId, std::map<NodeId, Counts>>& rows() const { return rows_; }
  /// Raters with at least one recorded interaction.
  std::size_t nonzeroRows() const;

 private:
  std::map<NodeId, std::map<NodeId, Counts>> rows_;
};

/// Row-stochastic n x n matrix stored sparsely. Rows without explicit
/// entries mean the uniform pre-trust distribution. An optional pre-trust
/// weight `a` blends every row toward uniform: (1 - a) C + a * 1 p^T.
class TrustMatrix {
 public:
  explicit TrustMatrix(std::size_t n) : rows_(n) {}

  /// Dense rows; each must be nonnegative and sum to 1 (within 1e-9).
  static TrustMatrix fromDense(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return rows_.size(); }
  void setRow(std::size_t i, std::vector<std::pair<std::size_t, double>> entries);
  bool isUniformRow(std::size_t i) const { return rows_[i].empty(); }

  double preTrustWeight() const { return preTrust_; }
  void setPreTrustWeight(double a);

  /// Effective entry c(i, j) including the uniform fallback and pre-trust blend.
  double at(std::size_t i, std::size_t j) const;

  /// C^T t.
  std::vector<double> leftMultiply(std::span<const double> t) const;

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  double preTrust_ = 0.0;
};

/// Normalized local trust over `peers` (index order = peers order):
/// s(i,j) = sat - unsat, c(i,j) = max(s,0) / sum_j max(s,0).
TrustMatrix localTrustMatrix(const InteractionLedger& ledger, std::span<const NodeId> peers);

struct TrustVector {
  std::vector<NodeId> peers;  // ascending
  std::vector<double> values;

  double of(NodeId id) const;
};

struct GlobalTrustResult {
  std::vector<double> trust;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration t <- C^T t from the uniform vector, renormalized to sum 1
/// each step, until the max-norm change drops below epsilon. On hitting
/// maxIters the last iterate is returned with converged = false.
GlobalTrustResult computeGlobalTrust(const TrustMatrix& c, double epsilon, std::size_t maxIters);

/// Argmax-trust neighbor among those no farther from the head than the
/// selector; ties go to the lower id.
std::optional<NodeId> eigentrustSelectLink(std::span<const NeighborDistance> neighbors,
                                           double ownDistanceToHead, const TrustVector& trust);

}  // namespace trustsense
