#include <gtest/gtest.h>

#include <numeric>

#include "trustsense/eigentrust.hpp"
#include "trustsense/rng.hpp"

using namespace trustsense;

namespace {

// Dense oracle: t <- C'^T t with C' = (1 - a) C + a / n, fixed iterations.
std::vector<double> bruteForce(const std::vector<std::vector<double>>& c, double a, int iters) {
  const auto n = c.size();
  std::vector<double> t(n, 1.0 / n);
  for (int k = 0; k < iters; ++k) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += t[i] * ((1 - a) * c[i][j] + a / n);
    }
    const double s = std::accumulate(next.begin(), next.end(), 0.0);
    for (auto& v : next) v /= s;
    t = next;
  }
  return t;
}

}  // namespace

TEST(Ledger, CountsAndRows) {
  InteractionLedger l;
  l.recordSatisfied({1}, {2});
  l.recordSatisfied({1}, {2});
  l.recordUnsatisfied({1}, {3});
  EXPECT_EQ(l.counts({1}, {2}).sat, 2u);
  EXPECT_EQ(l.counts({1}, {3}).unsat, 1u);
  EXPECT_EQ(l.counts({2}, {1}).sat, 0u);
  EXPECT_EQ(l.nonzeroRows(), 1u);
}

TEST(LocalTrust, NegativeBalanceClampsToZero) {
  InteractionLedger l;
  const std::vector<NodeId> peers{{0}, {1}, {2}, {3}};
  for (int i = 0; i < 4; ++i) l.recordSatisfied({0}, {1});
  for (int i = 0; i < 2; ++i) l.recordUnsatisfied({0}, {2});
  for (int i = 0; i < 4; ++i) l.recordSatisfied({0}, {3});
  const auto c = localTrustMatrix(l, peers);
  EXPECT_EQ(c.at(0, 0), 0.0);
  EXPECT_EQ(c.at(0, 1), 0.5);
  EXPECT_EQ(c.at(0, 2), 0.0);
  EXPECT_EQ(c.at(0, 3), 0.5);
  EXPECT_TRUE(c.isUniformRow(1));
  EXPECT_EQ(c.at(1, 2), 0.25);
}

TEST(LocalTrust, AllNegativeRowIsUniform) {
  InteractionLedger l;
  l.recordUnsatisfied({0}, {1});
  const std::vector<NodeId> peers{{0}, {1}};
  EXPECT_TRUE(localTrustMatrix(l, peers).isUniformRow(0));
}

TEST(Matrix, FromDenseValidates) {
  EXPECT_THROW(TrustMatrix::fromDense({{0.5, 0.4}, {0.5, 0.5}}), std::invalid_argument);
  EXPECT_THROW(TrustMatrix::fromDense({{1.5, -0.5}, {0.5, 0.5}}), std::invalid_argument);
  EXPECT_THROW(TrustMatrix::fromDense({{1.0}, {0.5, 0.5}}), std::invalid_argument);
  TrustMatrix m(2);
  EXPECT_THROW(m.setPreTrustWeight(1.5), std::invalid_argument);
}

TEST(Matrix, PreTrustBlend) {
  auto m = TrustMatrix::fromDense({{0, 1}, {1, 0}});
  m.setPreTrustWeight(0.1);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.9 + 0.05);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.05);
}

TEST(GlobalTrust, ThreeNodeChain) {
  // Stationary distribution (1/6, 1/3, 1/2).
  const auto c = TrustMatrix::fromDense({{0.5, 0, 0.5}, {0, 0.5, 0.5}, {1.0 / 6, 1.0 / 3, 0.5}});
  const auto r = computeGlobalTrust(c, 1e-12, 10000);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.trust[0], 1.0 / 6, 1e-9);
  EXPECT_NEAR(r.trust[1], 1.0 / 3, 1e-9);
  EXPECT_NEAR(r.trust[2], 0.5, 1e-9);
}

TEST(GlobalTrust, TwoNodeSwapIsFixedAtUniform) {
  const auto c = TrustMatrix::fromDense({{0, 1}, {1, 0}});
  const auto r = computeGlobalTrust(c, 1e-9, 100);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.trust, (std::vector<double>{0.5, 0.5}));
}

TEST(GlobalTrust, NonConvergenceReported) {
  // Uniform start is not a fixed point of this periodic chain.
  const auto c = TrustMatrix::fromDense({{0, 0, 1}, {0, 0, 1}, {0.5, 0.5, 0}});
  const auto r = computeGlobalTrust(c, 1e-9, 50);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 50u);
  EXPECT_NEAR(std::accumulate(r.trust.begin(), r.trust.end(), 0.0), 1.0, 1e-12);
}

TEST(GlobalTrust, EmptyAndBadEpsilon) {
  EXPECT_TRUE(computeGlobalTrust(TrustMatrix(0), 1e-9, 10).converged);
  EXPECT_THROW(computeGlobalTrust(TrustMatrix(2), 0.0, 10), std::invalid_argument);
}

TEST(GlobalTrust, MatchesDenseOracleOnRandomMatrices) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n));
    for (auto& row : dense) {
      double s = 0;
      for (auto& v : row) s += (v = rng.bernoulli(0.3) ? 0.0 : rng.uniform01());
      if (s == 0) {
        row[0] = 1;
        s = 1;
      }
      for (auto& v : row) v /= s;
    }
    auto c = TrustMatrix::fromDense(dense);
    c.setPreTrustWeight(0.1);
    const auto r = computeGlobalTrust(c, 1e-13, 100000);
    const auto oracle = bruteForce(dense, 0.1, 5000);
    ASSERT_TRUE(r.converged);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.trust[i], oracle[i], 1e-9);
  }
}

TEST(SelectLink, ArgmaxWithTieToLowerId) {
  TrustVector t{{{1}, {2}, {3}}, {0.2, 0.5, 0.5}};
  const std::vector<NeighborDistance> n{{{1}, 5.0}, {{3}, 6.0}, {{2}, 7.0}};
  EXPECT_EQ(eigentrustSelectLink(n, 10.0, t), NodeId{2});
  EXPECT_EQ(eigentrustSelectLink(n, 6.5, t), NodeId{3});
  EXPECT_EQ(eigentrustSelectLink(n, 5.0, t), NodeId{1});
  EXPECT_FALSE(eigentrustSelectLink(n, 4.0, t).has_value());
  EXPECT_EQ(t.of({9}), 0.0);
}
