#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tauleap/error.hpp"
#include "tauleap/simulate.hpp"
#include "test_networks.hpp"

using namespace tauleap;
using tauleap::testing::constant_pair;
using tauleap::testing::decay;
using tauleap::testing::dimer;
using tauleap::testing::empty_network;

TEST(Grid, UniformAndRefined) {
  const auto g = uniform_grid(1.0, 4);
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto f = refine_grid(g);
  ASSERT_EQ(f.size(), 9u);
  EXPECT_DOUBLE_EQ(f[1], 0.125);
  EXPECT_DOUBLE_EQ(f.back(), 1.0);
  EXPECT_NO_THROW(check_grid(f, 1.0));
}

TEST(Grid, RejectsMalformed) {
  EXPECT_THROW(check_grid({0.0, 0.5}, 1.0), ConfigError);
  EXPECT_THROW(check_grid({0.1, 1.0}, 1.0), ConfigError);
  EXPECT_THROW(check_grid({0.0, 0.6, 0.4, 1.0}, 1.0), ConfigError);
}

TEST(LeapSize, DecayExample) {
  const auto net = decay(10, 0.2);
  const State x{10};
  LeapControl c;
  c.epsilon = 0.05;
  EXPECT_NEAR(select_leap_size(net, x, c), 0.125, 1e-12);
  c.tau_max = 0.1;
  EXPECT_DOUBLE_EQ(select_leap_size(net, x, c), 0.1);
}

TEST(LeapSize, ConstantPropensitiesUseTauMax) {
  const auto net = constant_pair();
  LeapControl c;
  c.tau_max = 0.3;
  EXPECT_DOUBLE_EQ(select_leap_size(net, net.initial_state, c), 0.3);
}

TEST(LeapSize, AbsorbedStateThrows) {
  const auto net = decay(10, 0.2);
  const State zero{0};
  EXPECT_THROW(select_leap_size(net, zero, LeapControl{}), ArgumentError);
}

TEST(TauLeapStep, AppliesStoichiometry) {
  const auto net = constant_pair();
  RngStream r(1, 0);
  const auto step = tau_leap_step(net, net.initial_state, 2.0, r);
  EXPECT_EQ(step.state[0], 5 + step.increments[0] + step.increments[2]);
  EXPECT_EQ(step.state[1], 2 + step.increments[1] + step.increments[2]);
  EXPECT_THROW(tau_leap_step(net, net.initial_state, 0.0, r), ArgumentError);
}

TEST(Ssa, DecayMeanMatchesAnalytic) {
  const auto net = decay(10, 0.2);
  const int n = 20000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    RngStream r(17, static_cast<std::uint64_t>(k));
    s += static_cast<double>(ssa_terminal(net, net.initial_state, 1.0, r).state[0]);
  }
  const double p = std::exp(-0.2);
  EXPECT_NEAR(s / n, 10 * p, 4 * std::sqrt(10 * p * (1 - p) / n));
}

TEST(Ssa, PathAndSummaryAgree) {
  const auto net = dimer(200);
  RngStream a(3, 4), b(3, 4);
  const auto summary = ssa_terminal(net, net.initial_state, 1.0, a);
  const auto path = ssa_path(net, net.initial_state, 1.0, b);
  const auto last = path.terminal_state();
  EXPECT_EQ(State(last.begin(), last.end()), summary.state);
  EXPECT_DOUBLE_EQ(path.times().back(), 1.0);
  std::size_t fired = 0;
  for (std::size_t n = 0; n < path.steps(); ++n)
    for (auto v : path.increments(n)) fired += static_cast<std::size_t>(v);
  EXPECT_EQ(fired, summary.jumps);
}

TEST(Ssa, AbsorbedSystemHoldsState) {
  const auto net = empty_network();
  RngStream r(1, 0);
  const auto path = ssa_path(net, net.initial_state, 2.0, r);
  EXPECT_EQ(path.steps(), 1u);
  EXPECT_EQ(path.terminal_state()[0], 4);
}

TEST(TauLeapPath, FixedGridFollowsBaseGrid) {
  const auto net = decay(1000, 1.0);
  RngStream r(2, 0);
  const auto grid = uniform_grid(1.0, 8);
  const auto path = tau_leap_path(net, net.initial_state, grid, r);
  EXPECT_EQ(path.times(), grid);
  for (std::size_t n = 0; n < path.steps(); ++n) EXPECT_EQ(path.base_interval(n), n);
}

TEST(TauLeapPath, PreLeapSubdividesAndEndsOnGrid) {
  const auto net = dimer(1000);
  LeapControl c;
  c.mode = LeapControl::Mode::pre_leap;
  c.epsilon = 0.03;
  RngStream r(2, 0);
  const auto grid = uniform_grid(1.0, 2);
  const auto path = tau_leap_path(net, net.initial_state, grid, r, c);
  EXPECT_GT(path.steps(), 2u);
  EXPECT_DOUBLE_EQ(path.times().back(), 1.0);
  bool hit_mid = false;
  for (double t : path.times()) hit_mid |= t == 0.5;
  EXPECT_TRUE(hit_mid);
}

TEST(BridgePath, NeverNegativeOnStiffDecay) {
  const auto net = decay(10, 2.0);
  const auto grid = uniform_grid(1.0, 2);
  std::size_t halvings = 0;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    RngStream r(5, k);
    const auto bp = bridge_tau_leap_path(net, net.initial_state, grid, r);
    ASSERT_FALSE(bp.trajectory.went_negative());
    ASSERT_TRUE(bp.history.consistent());
    EXPECT_DOUBLE_EQ(bp.trajectory.times().back(), 1.0);
    halvings += bp.trajectory.halvings();
  }
  EXPECT_GT(halvings, 0u);
}

TEST(BridgePath, IncrementsMatchHistory) {
  const auto net = dimer(500);
  RngStream r(8, 1);
  const auto bp = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), r);
  for (std::size_t j = 0; j < net.channels(); ++j) {
    std::int64_t total = 0;
    for (std::size_t n = 0; n < bp.trajectory.steps(); ++n) total += bp.trajectory.increments(n)[j];
    EXPECT_EQ(total, bp.history.count(j));
  }
}

TEST(BridgePath, DeterministicForSeed) {
  const auto net = dimer(500);
  RngStream a(9, 3), b(9, 3);
  const auto pa = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), a);
  const auto pb = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), b);
  EXPECT_EQ(pa.trajectory.times(), pb.trajectory.times());
  const auto xa = pa.trajectory.terminal_state(), xb = pb.trajectory.terminal_state();
  EXPECT_EQ(State(xa.begin(), xa.end()), State(xb.begin(), xb.end()));
}

TEST(BridgePath, AbsorbedStateTakesEmptySteps) {
  const auto net = decay(1, 50.0);
  RngStream r(1, 0);
  const auto bp = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), r);
  EXPECT_EQ(bp.trajectory.terminal_state()[0], 0);
  EXPECT_DOUBLE_EQ(bp.trajectory.times().back(), 1.0);
}

TEST(CoupledPath, ConstantPropensitiesGiveIdenticalEndpoints) {
  const auto net = constant_pair();
  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream r(11, k);
    const auto coarse = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), r);
    const auto fine = coupled_refined_path(net, coarse, r);
    EXPECT_EQ(fine.times().size(), 9u);
    const auto xc = coarse.trajectory.terminal_state(), xf = fine.terminal_state();
    EXPECT_EQ(State(xc.begin(), xc.end()), State(xf.begin(), xf.end()));
  }
}

TEST(CoupledPath, FinePathIsUnbiasedHalfStepLeap) {
  // The fine path of decay with c*tau/2 has mean X0 (1 - c tau/2)^(2N).
  const auto net = decay(1000, 1.0);
  const std::size_t N = 4;
  const int paths = 4000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < paths; ++k) {
    RngStream r(21, static_cast<std::uint64_t>(k));
    const auto coarse = bridge_tau_leap_path(net, net.initial_state, uniform_grid(1.0, N), r);
    const auto v = static_cast<double>(coupled_refined_path(net, coarse, r).terminal_state()[0]);
    s += v;
    s2 += v * v;
  }
  const double mean = s / paths, se = std::sqrt((s2 / paths - mean * mean) / paths);
  EXPECT_NEAR(mean, 1000 * std::pow(1 - 1.0 / 8, 8), 4 * se);
}
