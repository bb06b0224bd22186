#include "ringhet/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>

namespace {

using ringhet::ActiveSet;
using ringhet::CouplingGraph;

// --- test oracles -----------------------------------------------------------

// L_1 = 1, L_2 = 3, L_n = L_{n-1} + L_{n-2}.
std::uint64_t lucas(int n) {
  if (n == 1) return 1;
  std::uint64_t prev = 1, cur = 3;
  for (int k = 3; k <= n; ++k) {
    std::uint64_t next = cur + prev;
    prev = cur;
    cur = next;
  }
  return n == 1 ? 1 : cur;
}

// Exhaustive subset filter, no pruning: ground truth for small n.
std::set<ActiveSet> brute_force_independent_sets(const CouplingGraph& g) {
  const int n = g.size();
  std::set<ActiveSet> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    ActiveSet z;
    for (int v = 1; v <= n; ++v)
      if (mask & (1u << (v - 1))) z.push_back(v);
    bool ok = true;
    for (int a : z)
      for (int b : z)
        if (a != b && g.inhibits(a, b)) ok = false;
    if (ok) out.insert(z);
  }
  return out;
}

// --- construction -----------------------------------------------------------

TEST(Ring, FiveOneAdjacency) {
  const auto g = ringhet::make_ring(5, 1);
  // node k inhibited by k-1 only
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b)
      EXPECT_EQ(g.inhibits(a, b), (b - a + 5) % 5 == 1) << a << "->" << b;
  EXPECT_EQ(g.ring_m(), 1);
}

TEST(Ring, FiveTwoAdjacency) {
  const auto g = ringhet::make_ring(5, 2);
  EXPECT_EQ(g.inhibitors_of(1), (std::vector<int>{4, 5}));
  EXPECT_EQ(g.targets_of(1), (std::vector<int>{2, 3}));
  EXPECT_EQ(g.ring_m(), 2);
}

TEST(Ring, DomainErrors) {
  EXPECT_THROW(ringhet::make_ring(2, 1), std::domain_error);
  EXPECT_THROW(ringhet::make_ring(5, 0), std::domain_error);
  // m must stay below n/2, otherwise "inhibited by both sides" degenerates
  EXPECT_THROW(ringhet::make_ring(6, 3), std::domain_error);
  EXPECT_NO_THROW(ringhet::make_ring(7, 3));
}

TEST(FromAdjacency, MatchesRingBuilder) {
  const auto ring = ringhet::make_ring(6, 2);
  std::vector<std::vector<bool>> a(6, std::vector<bool>(6, false));
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) a[i - 1][j - 1] = ring.inhibits(i, j);
  const auto g = CouplingGraph::from_adjacency(a);
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j)
      EXPECT_EQ(g.inhibits(i, j), ring.inhibits(i, j));
  EXPECT_EQ(g.ring_m(), 2);  // ring structure recognised in raw matrices
}

TEST(FromAdjacency, RejectsSelfLoopAndNonSquare) {
  std::vector<std::vector<bool>> loop{{true, false}, {false, false}};
  EXPECT_THROW(CouplingGraph::from_adjacency(loop), std::invalid_argument);
  std::vector<std::vector<bool>> ragged{{false, true}, {false}};
  EXPECT_THROW(CouplingGraph::from_adjacency(ragged), std::invalid_argument);
}

TEST(FromAdjacency, EdgelessGraphIsNotARing) {
  std::vector<std::vector<bool>> a(4, std::vector<bool>(4, false));
  const auto g = CouplingGraph::from_adjacency(a);
  EXPECT_FALSE(g.ring_m().has_value());
}

// --- independent sets -------------------------------------------------------

TEST(IndependentSets, MatchesBruteForceOnAssortedGraphs) {
  for (auto [n, m] : {std::pair{5, 1}, {6, 1}, {7, 1}, {5, 2}, {7, 2}, {9, 4}}) {
    const auto g = ringhet::make_ring(n, m);
    const auto got = ringhet::independent_sets(g);
    const auto want = brute_force_independent_sets(g);
    ASSERT_EQ(got.size(), want.size()) << "(" << n << "," << m << ")";
    for (const auto& z : got) EXPECT_TRUE(want.count(z));
  }
}

TEST(IndependentSets, LucasCountOnOneRings) {
  // Independent sets of the (n,1) ring, empty set included, number L_n.
  for (int n = 3; n <= 14; ++n)
    EXPECT_EQ(ringhet::independent_sets(ringhet::make_ring(n, 1)).size(),
              lucas(n))
        << "n=" << n;
}

TEST(IndependentSets, KnownSmallCensuses) {
  const auto five = ringhet::independent_sets(ringhet::make_ring(5, 1));
  ASSERT_EQ(five.size(), 11u);  // L_5
  EXPECT_TRUE(five.front().empty());
  // 5 singletons, 5 pairs
  EXPECT_EQ(std::count_if(five.begin(), five.end(),
                          [](const ActiveSet& z) { return z.size() == 1; }),
            5);
  EXPECT_EQ(std::count_if(five.begin(), five.end(),
                          [](const ActiveSet& z) { return z.size() == 2; }),
            5);

  EXPECT_EQ(ringhet::independent_sets(ringhet::make_ring(6, 1)).size(), 18u);
}

TEST(IndependentSets, SortedBySizeThenLex) {
  const auto sets = ringhet::independent_sets(ringhet::make_ring(6, 1));
  for (std::size_t i = 1; i < sets.size(); ++i) {
    const auto& a = sets[i - 1];
    const auto& b = sets[i];
    EXPECT_TRUE(a.size() < b.size() || (a.size() == b.size() && a < b));
  }
}

TEST(IndependentSets, EdgelessTwoNodeGraph) {
  std::vector<std::vector<bool>> a(2, std::vector<bool>(2, false));
  const auto sets = ringhet::independent_sets(CouplingGraph::from_adjacency(a));
  const std::vector<ActiveSet> want{{}, {1}, {2}, {1, 2}};
  EXPECT_EQ(sets, want);
}

TEST(IndependentSets, NodeCapIsEnforced) {
  std::vector<std::vector<bool>> a(25, std::vector<bool>(25, false));
  const auto g = CouplingGraph::from_adjacency(a);
  EXPECT_THROW(ringhet::independent_sets(g), std::domain_error);
  // raising the cap admits a 25-node graph; a dense ring keeps the
  // enumeration itself tiny (only singletons are independent)
  EXPECT_EQ(ringhet::independent_sets(ringhet::make_ring(25, 12), 25).size(),
            26u);
}

// --- suppression profiles ---------------------------------------------------

TEST(SuppressionProfile, FiveOneSingleton) {
  const auto g = ringhet::make_ring(5, 1);
  const auto p = ringhet::suppression_profile(g, {1});
  EXPECT_EQ(p.suppressed, (std::map<int, int>{{2, 1}}));
  EXPECT_EQ(p.growing, (std::vector<int>{3, 4, 5}));
}

TEST(SuppressionProfile, FiveTwoSingleton) {
  const auto g = ringhet::make_ring(5, 2);
  const auto p = ringhet::suppression_profile(g, {1});
  EXPECT_EQ(p.suppressed, (std::map<int, int>{{2, 1}, {3, 1}}));
  EXPECT_EQ(p.growing, (std::vector<int>{4, 5}));
}

TEST(SuppressionProfile, EmptySetLeavesEverythingGrowing) {
  const auto g = ringhet::make_ring(5, 1);
  const auto p = ringhet::suppression_profile(g, {});
  EXPECT_TRUE(p.suppressed.empty());
  EXPECT_EQ(p.growing, (std::vector<int>{1, 2, 3, 4, 5}));
}

TEST(SuppressionProfile, RejectsDependentSet) {
  const auto g = ringhet::make_ring(5, 1);
  EXPECT_THROW(ringhet::suppression_profile(g, {1, 2}), std::domain_error);
}

TEST(SuppressionProfile, MatchesDirectAdjacencyEvaluation) {
  // Property check against a per-node count straight off the matrix.
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % ((n - 1) / 2));
    const auto g = ringhet::make_ring(n, m);
    const auto sets = ringhet::independent_sets(g);
    const auto& z = sets[rng() % sets.size()];
    const auto p = ringhet::suppression_profile(g, z);

    std::size_t covered = z.size();
    for (int b = 1; b <= n; ++b) {
      if (std::find(z.begin(), z.end(), b) != z.end()) continue;
      int ns = 0;
      for (int a : z) ns += g.inhibits(a, b) ? 1 : 0;
      if (ns > 0) {
        auto it = p.suppressed.find(b);
        ASSERT_NE(it, p.suppressed.end());
        EXPECT_EQ(it->second, ns);
      } else {
        EXPECT_TRUE(std::find(p.growing.begin(), p.growing.end(), b) !=
                    p.growing.end());
      }
      ++covered;
    }
    // partition covers every node exactly once
    EXPECT_EQ(covered, z.size() + p.suppressed.size() + p.growing.size());
  }
}

TEST(RotateSet, WrapsAndSorts) {
  EXPECT_EQ(ringhet::rotate_set({1, 3}, 2, 5), (ActiveSet{3, 5}));
  EXPECT_EQ(ringhet::rotate_set({4, 5}, 2, 5), (ActiveSet{1, 2}));
  EXPECT_EQ(ringhet::rotate_set({2}, -3, 5), (ActiveSet{4}));
}

TEST(RotateSet, RotationPreservesIndependence) {
  const auto g = ringhet::make_ring(9, 2);
  for (const auto& z : ringhet::independent_sets(g))
    for (int s = 0; s < 9; ++s)
      EXPECT_TRUE(ringhet::is_independent(g, ringhet::rotate_set(z, s, 9)));
}

}  // namespace
