#include "ringhet/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <stdexcept>

namespace {

using ringhet::CycleDescriptor;
using ringhet::EpochSeries;
using ringhet::HetNetwork;
using ringhet::SimParams;

// Direct transcription of the map for one node, kept deliberately naive so
// the vectorized implementation is checked against first principles.
double map_one_node(const ringhet::CouplingGraph& g, const Eigen::VectorXd& x,
                    int node, double r, double gamma) {
  double inhibition = 0.0;
  for (int a = 1; a <= g.size(); ++a)
    if (g.inhibits(a, node)) inhibition += x[a - 1];
  return r * x[node - 1] * (1.0 - x[node - 1]) * std::exp(-gamma * inhibition);
}

Eigen::VectorXd random_state(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

// --- single map applications --------------------------------------------------

TEST(Step, MatchesDirectFormula) {
  const auto g = ringhet::make_ring(7, 2);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = random_state(rng, 7);
    const Eigen::VectorXd y = ringhet::step(g, x, 2.0, 3.04);
    for (int b = 1; b <= 7; ++b)
      EXPECT_DOUBLE_EQ(y[b - 1], map_one_node(g, x, b, 2.0, 3.04));
  }
}

TEST(Step, FixedPointsAreInvariant) {
  for (auto [n, m, gamma] : {std::tuple{5, 1, 3.04}, {7, 2, 6.24}}) {
    const auto g = ringhet::make_ring(n, m);
    for (const auto& fp : ringhet::fixed_points(g, 2.0)) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int a : fp.active) x[a - 1] = fp.xhat;
      const Eigen::VectorXd y = ringhet::step(g, x, 2.0, gamma);
      EXPECT_LT((y - x).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Step, LogAndPlainAgreeOnInteriorStates) {
  const auto g = ringhet::make_ring(5, 1);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x = random_state(rng, 5);
    x = x.cwiseMax(1e-12);  // keep strictly positive
    const Eigen::VectorXd plain = ringhet::step(g, x, 2.0, 3.04);
    const Eigen::VectorXd via_log =
        ringhet::log_step(g, x.array().log(), 2.0, 3.04).array().exp();
    for (int i = 0; i < 5; ++i)
      EXPECT_NEAR(via_log[i], plain[i], 1e-12 * std::max(1.0, plain[i]));
  }
}

TEST(Step, ExactZerosArePreserved) {
  const auto g = ringhet::make_ring(6, 1);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = random_state(rng, 6);
    x[1] = 0.0;
    x[4] = 0.0;
    Eigen::VectorXd plain = x, logged = x.array().log();
    for (int i = 0; i < 50; ++i) {
      plain = ringhet::step(g, plain, 2.0, 3.04);
      logged = ringhet::log_step(g, logged, 2.0, 3.04);
      EXPECT_EQ(plain[1], 0.0);
      EXPECT_EQ(plain[4], 0.0);
      EXPECT_TRUE(std::isinf(logged[1]) && logged[1] < 0);
      EXPECT_TRUE(std::isinf(logged[4]) && logged[4] < 0);
    }
  }
}

// sigma-equivariance: rotating the state commutes with the map (rings have
// at most two inhibitors per node here, so the sums are exactly commutative)
TEST(Step, RotationEquivariance) {
  for (auto [n, m] : {std::pair{7, 1}, {7, 2}}) {
    const auto g = ringhet::make_ring(n, m);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = random_state(rng, n);
      Eigen::VectorXd rotated(n);
      for (int i = 0; i < n; ++i) rotated[(i + 1) % n] = x[i];
      const Eigen::VectorXd a = ringhet::step(g, rotated, 2.0, 3.04);
      const Eigen::VectorXd b = ringhet::step(g, x, 2.0, 3.04);
      for (int i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(a[(i + 1) % n], b[i]);
    }
  }
}

// --- trajectory recording ------------------------------------------------------

TEST(Simulate, RecordsInitialStateAndEveryStep) {
  const auto g = ringhet::make_ring(5, 1);
  SimParams p;
  p.steps = 10;
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(5, 0.3);
  const auto t = ringhet::simulate(g, x0, p);
  ASSERT_EQ(t.states.size(), 11u);
  EXPECT_EQ(t.states[0], x0);
  EXPECT_EQ(t.states[1], ringhet::step(g, x0, p.r, p.gamma));
  EXPECT_FALSE(t.aborted);
  EXPECT_TRUE(t.log_states.empty());  // plain run
}

TEST(Simulate, LogDomainRunKeepsBothViews) {
  const auto g = ringhet::make_ring(5, 1);
  SimParams p;
  p.steps = 5;
  p.log_domain = true;
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(5, 0.3);
  const auto t = ringhet::simulate(g, x0, p);
  ASSERT_EQ(t.states.size(), 6u);
  ASSERT_EQ(t.log_states.size(), 6u);
  for (std::size_t i = 0; i < t.states.size(); ++i)
    EXPECT_LT(
        (t.states[i] - t.log_states[i].array().exp().matrix()).norm(), 1e-12);
}

TEST(Simulate, StopsAtCrossingBudget) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, 42);
  SimParams p;
  p.steps = 1000000;
  p.stop_after_crossings = 3;
  const auto t = ringhet::simulate(net.graph, x0, p);
  ASSERT_LT(t.states.size(), 10000u);

  // count upward theta-crossings in the recorded states directly
  const double theta = p.resolved_theta();
  int crossings = 0;
  for (std::size_t i = 1; i < t.states.size(); ++i)
    for (int c = 0; c < 5; ++c)
      if (t.states[i - 1][c] < theta && t.states[i][c] >= theta) ++crossings;
  EXPECT_EQ(crossings, 3);
  // the run stops at the step that completes the budget
  bool last_step_crosses = false;
  const auto& prev = t.states[t.states.size() - 2];
  const auto& last = t.states.back();
  for (int c = 0; c < 5; ++c)
    if (prev[c] < theta && last[c] >= theta) last_step_crosses = true;
  EXPECT_TRUE(last_step_crosses);
}

TEST(Simulate, PlainModeUnderflowIsReported) {
  // strong suppression drives valleys below the smallest double in a few
  // epochs; the plain integrator must say so rather than fail silently
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, 7);
  SimParams p;
  p.r = 2.0;
  p.gamma = 6.24;
  p.steps = 5000;
  const auto t = ringhet::simulate(net.graph, x0, p);
  EXPECT_FALSE(t.aborted);
  ASSERT_FALSE(t.warnings.empty());
  bool mentions_underflow = false;
  for (const auto& w : t.warnings)
    if (w.find("underflow") != std::string::npos) mentions_underflow = true;
  EXPECT_TRUE(mentions_underflow);

  bool some_component_died = false;
  for (const auto& s : t.states)
    if ((s.array() == 0.0).any()) some_component_died = true;
  EXPECT_TRUE(some_component_died);
}

TEST(Simulate, FloorClampsSmallComponents) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, 7);
  SimParams p;
  p.gamma = 6.24;
  p.steps = 5000;
  p.floor = 1e-30;
  const auto t = ringhet::simulate(net.graph, x0, p);
  for (const auto& s : t.states.back()) EXPECT_GE(s, 1e-30);
  for (const auto& s : t.states)
    EXPECT_FALSE((s.array() == 0.0).any());
}

// --- epoch extraction ----------------------------------------------------------

EpochSeries pair_cycle_epochs(const HetNetwork& net, int crossings,
                              std::uint64_t seed) {
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 3}), 1e-6, seed);
  SimParams p;
  p.gamma = net.gamma;
  p.steps = 100000000;
  p.log_domain = true;
  p.stop_after_crossings = crossings;
  return ringhet::simulate_epochs(net, x0, p);
}

TEST(Epochs, ShadowsWalkThePairCycle) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto s = pair_cycle_epochs(net, 11, 42);
  ASSERT_EQ(s.epochs.size(), 10u);
  for (const auto& e : s.epochs) {
    ASSERT_GE(e.shadow, 0);
    EXPECT_EQ(net.fixed_points[e.shadow].active.size(), 2u);
  }
  // consecutive shadows must be joined by connections of the network
  for (std::size_t k = 1; k < s.epochs.size(); ++k) {
    bool joined = false;
    for (int cid : net.out_edges[s.epochs[k - 1].shadow])
      if (net.connections[cid].target == s.epochs[k].shadow) joined = true;
    EXPECT_TRUE(joined) << "epoch " << k;
  }
}

TEST(Epochs, DurationsGrowLikeTheDominantEigenvalue) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto s = pair_cycle_epochs(net, 11, 42);
  ASSERT_GE(s.epochs.size(), 8u);
  // the pair cycle's composed map has dominant root of z^2 - d z - d
  const double d = ringhet::delta_from(2.0, 3.04).value;
  const double lambda = (d + std::sqrt(d * d + 4.0 * d)) / 2.0;
  for (std::size_t k = s.epochs.size() - 3; k < s.epochs.size(); ++k) {
    const double ratio = static_cast<double>(s.epochs[k].duration) /
                         static_cast<double>(s.epochs[k - 1].duration);
    EXPECT_NEAR(ratio, lambda, 0.05 * lambda) << "epoch " << k;
  }
}

TEST(Epochs, ValleysDeepenMonotonically) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto s = pair_cycle_epochs(net, 11, 43);
  ASSERT_GE(s.epochs.size(), 9u);
  for (std::size_t k = 1; k < s.epochs.size(); ++k)
    EXPECT_LT(s.epochs[k].valley, s.epochs[k - 1].valley);
  // depths are genuinely beyond double range territory by epoch ten
  EXPECT_LT(s.epochs.back().valley, -100.0);
}

TEST(Epochs, ExtractFromRecordingMatchesOnline) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto x0 = ringhet::perturbed_ic(net, net.index_of({1, 4}), 1e-6, 9);
  SimParams p;
  p.steps = 100000;
  p.log_domain = true;
  p.stop_after_crossings = 6;
  const auto online = ringhet::simulate_epochs(net, x0, p);
  const auto recorded = ringhet::simulate(net.graph, x0, p);
  const auto offline =
      ringhet::extract_epochs(recorded, net, p.resolved_theta());
  ASSERT_EQ(online.epochs.size(), offline.epochs.size());
  for (std::size_t k = 0; k < online.epochs.size(); ++k) {
    EXPECT_EQ(online.epochs[k].boundary, offline.epochs[k].boundary);
    EXPECT_EQ(online.epochs[k].duration, offline.epochs[k].duration);
    EXPECT_EQ(online.epochs[k].shadow, offline.epochs[k].shadow);
    EXPECT_NEAR(online.epochs[k].valley, offline.epochs[k].valley, 1e-12);
  }
}

TEST(Epochs, InsufficientCrossingsThrow) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(5);
  x0[0] = 0.5;
  x0[2] = 0.5;  // exactly on the fixed point: nothing ever crosses
  SimParams p;
  p.steps = 50;
  const auto t = ringhet::simulate(net.graph, x0, p);
  EXPECT_THROW(ringhet::extract_epochs(t, net, p.resolved_theta()),
               std::runtime_error);
}

// --- initial conditions ---------------------------------------------------------

TEST(PerturbedIC, SeededDrawsAreDeterministicAndInRange) {
  const auto net = ringhet::build_network(ringhet::make_ring(7, 1), 2.0, 3.04);
  const int fp = net.index_of({1, 4});
  const auto a = ringhet::perturbed_ic(net, fp, 1e-4, 1234);
  const auto b = ringhet::perturbed_ic(net, fp, 1e-4, 1234);
  const auto c = ringhet::perturbed_ic(net, fp, 1e-4, 1235);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (int i = 0; i < 7; ++i) {
    if (i == 0 || i == 3) {
      EXPECT_DOUBLE_EQ(a[i], 0.5);
    } else {
      EXPECT_GE(a[i], 0.0);
      EXPECT_LT(a[i], 1e-4);
    }
  }
}

TEST(PerturbedIC, ZeroEpsilonIsTheFixedPointExactly) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const auto x = ringhet::perturbed_ic(net, net.index_of({2, 5}), 0.0, 1);
  Eigen::VectorXd want = Eigen::VectorXd::Zero(5);
  want[1] = want[4] = 0.5;
  EXPECT_EQ(x, want);
}

TEST(PerturbedIC, DomainChecks) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 3.04);
  const int fp = net.index_of({1, 3});
  EXPECT_THROW(ringhet::perturbed_ic(net, fp, 0.05, 1), std::domain_error);
  EXPECT_THROW(ringhet::perturbed_ic(net, fp, -1e-9, 1), std::domain_error);
  EXPECT_THROW(ringhet::perturbed_ic(net, -1, 1e-6, 1), std::out_of_range);
}

TEST(EigenvectorIC, DepthsFollowTheChosenEigenvector) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto delta = ringhet::delta_from(2.0, 6.24);
  CycleDescriptor singleton;
  for (const auto& c : ringhet::enumerate_cycles(net))
    if (c.active_count == 1) singleton = c;
  ASSERT_EQ(singleton.path.size(), 5u);
  const auto m = ringhet::transition_matrix_for_cycle(net, singleton, delta);

  // closed-form eigenvector of the real root: v = (1, 1+rho, 1+rho+rho^2)
  const auto rs = ringhet::roots(ringhet::char_poly(1, 3, delta.value));
  const double rho = rs[2].real();
  Eigen::Vector3d v{1.0, 1.0 + rho, 1.0 + rho + rho * rho};
  v /= v.maxCoeff();

  const double scale = -60.0;
  const auto x = ringhet::eigenvector_ic(net, singleton, m, 2, scale);
  // base fixed point xi_1 active; previous entering xi_2's displaced node 2
  // still sits at the plateau
  EXPECT_DOUBLE_EQ(x[0], 0.5);
  EXPECT_DOUBLE_EQ(x[1], 0.5);
  ASSERT_EQ(m.basis.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    const int node = m.basis[i];
    EXPECT_NEAR(std::log(x[node - 1]), scale * v[i], 1e-9 * std::abs(scale))
        << "tracked node " << node;
  }
}

TEST(EigenvectorIC, RejectsComplexMixedSignAndBadScale) {
  const auto net5 = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto delta = ringhet::delta_from(2.0, 6.24);
  CycleDescriptor singleton;
  for (const auto& c : ringhet::enumerate_cycles(net5))
    if (c.active_count == 1) singleton = c;
  const auto m = ringhet::transition_matrix_for_cycle(net5, singleton, delta);
  // dominant pair of this matrix is complex
  EXPECT_THROW(ringhet::eigenvector_ic(net5, singleton, m, 0, -60.0),
               std::domain_error);
  EXPECT_THROW(ringhet::eigenvector_ic(net5, singleton, m, 2, 1.0),
               std::domain_error);

  // the (5,2) one-step-back loop has eigenvalue -1 with mixed-sign vector
  const auto net52 =
      ringhet::build_network(ringhet::make_ring(5, 2), 2.0, 6.24);
  for (const auto& c : ringhet::enumerate_cycles(net52)) {
    if (c.path.size() != 5 || c.rotation != 4) continue;
    const auto a = ringhet::transition_matrix_for_cycle(net52, c, delta);
    EXPECT_THROW(ringhet::eigenvector_ic(net52, c, a, 2, -60.0),
                 std::domain_error);
    // the +sqrt(d) eigenvector (1, 1+s, s) is one-signed and accepted
    const auto x = ringhet::eigenvector_ic(net52, c, a, 0, -40.0);
    EXPECT_DOUBLE_EQ(x.maxCoeff(), 0.5);
  }
}

TEST(CycleIcFromLogs, PlacesEachGroupWhereAsked) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto delta = ringhet::delta_from(2.0, 6.24);
  CycleDescriptor singleton;
  for (const auto& c : ringhet::enumerate_cycles(net))
    if (c.active_count == 1) singleton = c;
  const auto m = ringhet::transition_matrix_for_cycle(net, singleton, delta);
  ASSERT_EQ(m.basis.size(), 3u);

  Eigen::Vector3d logs{-10.0, -20.0, -30.0};
  const auto x = ringhet::cycle_ic_from_logs(net, singleton, m, logs);
  int plateau = 0;
  for (int i = 0; i < 5; ++i) plateau += x[i] == 0.5 ? 1 : 0;
  EXPECT_EQ(plateau, 2);  // base point's active node plus the decayer
  for (int i = 0; i < 3; ++i)
    EXPECT_DOUBLE_EQ(x[m.basis[i] - 1], std::exp(logs[i]));

  EXPECT_THROW(
      ringhet::cycle_ic_from_logs(net, singleton, m, Eigen::Vector2d{-1, -2}),
      std::invalid_argument);
  EXPECT_THROW(ringhet::cycle_ic_from_logs(net, singleton, m,
                                           Eigen::Vector3d{-1.0, 0.0, -2.0}),
               std::domain_error);
  // a bare symmetric matrix carries no coordinate basis
  const auto bare = ringhet::transition_matrix_symmetric(1, 3, delta.value);
  EXPECT_THROW(ringhet::cycle_ic_from_logs(net, singleton, bare, logs),
               std::invalid_argument);
}

// Longest initial stretch of epochs that walks the singleton level along
// network connections; the comparison oracle for how long an IC keeps a
// trajectory on the cycle.
static int singleton_walk(const ringhet::EpochSeries& s,
                          const ringhet::HetNetwork& net) {
  int count = 0;
  int prev = -1;
  for (const auto& e : s.epochs) {
    if (e.shadow < 0) break;
    if (net.fixed_points[e.shadow].active.size() != 1u) break;
    if (prev >= 0) {
      bool linked = false;
      for (int cid : net.out_edges.at(prev))
        if (net.connections[cid].target == e.shadow) linked = true;
      if (!linked) break;
    }
    prev = e.shadow;
    ++count;
  }
  return count;
}

TEST(AlignedEigenvectorIC, OutlastsThePlainAlignment) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto delta = ringhet::delta_from(2.0, 6.24);
  CycleDescriptor singleton;
  for (const auto& c : ringhet::enumerate_cycles(net))
    if (c.active_count == 1) singleton = c;
  const auto m = ringhet::transition_matrix_for_cycle(net, singleton, delta);

  SimParams p;
  p.r = 2.0;
  p.gamma = 6.24;
  p.steps = 2000000;
  p.log_domain = true;
  p.stop_after_crossings = 40;

  const double scale = -200.0;
  const auto naive = ringhet::eigenvector_ic(net, singleton, m, 2, scale);
  const auto aligned =
      ringhet::aligned_eigenvector_ic(net, singleton, m, 2, scale);
  const int naive_walk =
      singleton_walk(ringhet::simulate_epochs(net, naive, p), net);
  const int aligned_walk =
      singleton_walk(ringhet::simulate_epochs(net, aligned, p), net);
  EXPECT_LE(naive_walk, 12);
  EXPECT_GE(aligned_walk, 15);
  EXPECT_GT(aligned_walk, naive_walk);
}

TEST(AlignedEigenvectorIC, RejectsUnsuitableCyclesAndScales) {
  const auto net = ringhet::build_network(ringhet::make_ring(5, 1), 2.0, 6.24);
  const auto delta = ringhet::delta_from(2.0, 6.24);
  CycleDescriptor singleton;
  for (const auto& c : ringhet::enumerate_cycles(net))
    if (c.active_count == 1) singleton = c;
  const auto m = ringhet::transition_matrix_for_cycle(net, singleton, delta);

  EXPECT_THROW(ringhet::aligned_eigenvector_ic(net, singleton, m, 2, 1.0),
               std::domain_error);

  auto multi = m;
  multi.epochs = 2;
  EXPECT_THROW(ringhet::aligned_eigenvector_ic(net, singleton, multi, 2, -60),
               std::invalid_argument);

  auto broken = singleton;
  broken.symmetric = false;
  EXPECT_THROW(ringhet::aligned_eigenvector_ic(net, broken, m, 2, -60.0),
               std::invalid_argument);
}

// --- valley-sequence fitting -----------------------------------------------------

TEST(Fit, RecoversASyntheticTriple) {
  const std::complex<double> l1 = std::polar(1.8, 2.2);
  const double l2 = 1.07;
  const double c1 = -12.0, c2 = 0.35, c3 = 0.9;
  std::vector<double> xs;
  for (int k = 0; k < 20; ++k)
    xs.push_back(c1 * std::pow(l2, k) +
                 c2 * std::pow(1.8, k) * std::cos(2.2 * k + c3));
  const auto fit = ringhet::fit_decay(xs, l1, l2);
  EXPECT_NEAR(fit.c1, c1, 1e-8);
  EXPECT_NEAR(fit.c2, c2, 1e-8);
  EXPECT_NEAR(fit.c3, c3, 1e-8);
  EXPECT_LT(fit.rms, 1e-8);
  EXPECT_GT(fit.rms_pure_lambda2, 1.0);  // the oscillation is enormous by k=19
  EXPECT_TRUE(fit.c3_identifiable);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_EQ(fit.points, 20);
}

TEST(Fit, PureGeometricLeavesPhaseUnidentifiable) {
  const std::complex<double> l1 = std::polar(1.8, 2.2);
  std::vector<double> xs;
  for (int k = 0; k < 12; ++k) xs.push_back(-3.0 * std::pow(1.07, k));
  const auto fit = ringhet::fit_decay(xs, l1, 1.07);
  EXPECT_NEAR(fit.c1, -3.0, 1e-9);
  EXPECT_NEAR(fit.c2, 0.0, 1e-9);
  EXPECT_FALSE(fit.c3_identifiable);
}

TEST(Fit, RealContaminantIsRankDeficient) {
  // arg(lambda1) = 0 zeroes the sine regressor; the fit must say degenerate
  // rather than return arbitrary coefficients
  std::vector<double> xs;
  for (int k = 0; k < 12; ++k)
    xs.push_back(-3.0 * std::pow(1.07, k) + 0.2 * std::pow(1.8, k));
  const auto fit = ringhet::fit_decay(xs, {1.8, 0.0}, 1.07);
  EXPECT_TRUE(fit.degenerate);
}

TEST(Fit, RequiresSixPoints) {
  std::vector<double> xs{-1, -2, -3, -4, -5};
  EXPECT_THROW(ringhet::fit_decay(xs, std::polar(1.8, 2.2), 1.07),
               std::runtime_error);
}

// --- epoch growth rate ------------------------------------------------------------

TEST(GrowthRate, GeometricSeriesIsRecovered) {
  EpochSeries s;
  for (int k = 0; k < 10; ++k) {
    ringhet::Epoch e;
    e.boundary = 0;
    e.duration = static_cast<long>(std::lround(20.0 * std::pow(1.84, k)));
    e.valley = -1.0;
    e.shadow = 0;
    s.epochs.push_back(e);
  }
  const auto g = ringhet::epoch_growth_rate(s);
  EXPECT_NEAR(g.rate, 1.84, 0.02);
  EXPECT_FALSE(g.high_variance);
}

TEST(GrowthRate, IrregularSeriesIsFlagged) {
  EpochSeries s;
  for (int k = 0; k < 10; ++k) {
    ringhet::Epoch e;
    e.boundary = 0;
    e.duration = (k % 2 == 0) ? 10 : 40;
    e.valley = -1.0;
    e.shadow = 0;
    s.epochs.push_back(e);
  }
  EXPECT_TRUE(ringhet::epoch_growth_rate(s).high_variance);

  s.epochs.resize(3);
  EXPECT_THROW(ringhet::epoch_growth_rate(s), std::runtime_error);
}

// --- connections are realized by the flow -----------------------------------------

TEST(Realization, PerturbingTheEnteringNodeReachesThePredictedTarget) {
  // kick a fixed point along one entering node only; the trajectory must
  // land on the target the set algebra predicts (all other perturbations
  // stay exactly zero, so the outcome is unambiguous)
  for (auto [n, m, gamma] : {std::tuple{5, 1, 3.04}, {7, 2, 6.24}}) {
    const auto net = ringhet::build_network(ringhet::make_ring(n, m), 2.0, gamma);
    for (const auto& conn : net.connections) {
      const auto& src = net.fixed_points[conn.source];
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int a : src.active) x[a - 1] = src.xhat;
      x[conn.entering - 1] = 1e-8;

      for (int i = 0; i < 600; ++i) x = ringhet::step(net.graph, x, 2.0, gamma);

      const auto& tgt = net.fixed_points[conn.target];
      Eigen::VectorXd want = Eigen::VectorXd::Zero(n);
      for (int a : tgt.active) want[a - 1] = tgt.xhat;
      EXPECT_LT((x - want).cwiseAbs().maxCoeff(), 1e-6)
          << ringhet::to_string(src.active) << " kicked along "
          << conn.entering;
    }
  }
}

// --- seed streams -------------------------------------------------------------------

TEST(Seeds, StreamDerivationIsDeterministicAndSpread) {
  const auto a = ringhet::derive_stream_seed(12345, 0);
  EXPECT_EQ(a, ringhet::derive_stream_seed(12345, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t run = 0; run < 100; ++run)
    seen.insert(ringhet::derive_stream_seed(12345, run));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(ringhet::derive_stream_seed(12345, 1),
            ringhet::derive_stream_seed(12346, 1));
}

}  // namespace
