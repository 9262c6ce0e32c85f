#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "tauleap/error.hpp"
#include "tauleap/kbe.hpp"
#include "tauleap/simulate.hpp"
#include "test_networks.hpp"

using namespace tauleap;
using tauleap::testing::constant_pair;
using tauleap::testing::decay;
using tauleap::testing::dimer;

namespace {
double binomial_second_moment(double x, double p) { return x * p * (1 - p) + x * x * p * p; }
}  // namespace

TEST(Lattice, FullGridIndexing) {
  Lattice lat(GridMode::full, {{0, 1, 2}, {0, 1, 2, 3}});
  EXPECT_EQ(lat.size(), 12u);
  for (std::size_t k = 0; k < lat.size(); ++k) {
    const State p = lat.point(k);
    const std::size_t pos[] = {static_cast<std::size_t>(p[0]), static_cast<std::size_t>(p[1])};
    EXPECT_EQ(lat.flatten(pos), k);
  }
  EXPECT_EQ(lat.find(1, 4), Lattice::npos);
  EXPECT_THROW(Lattice(GridMode::full, {{1, 2}}), ConfigError);
}

TEST(Lattice, LogNodes) {
  const auto nodes = log_nodes(1000000, 60);
  for (std::int64_t k = 0; k <= kDenseLimit; ++k) EXPECT_EQ(nodes[static_cast<std::size_t>(k)], k);
  EXPECT_EQ(nodes.back(), 1000000);
  for (std::size_t k = 1; k < nodes.size(); ++k) EXPECT_LT(nodes[k - 1], nodes[k]);
  EXPECT_LE(nodes.size(), 16u + 60u);
  const auto small = log_nodes(10, 60);
  EXPECT_EQ(small.size(), 11u);
}

TEST(Lattice, FullGridCapIsEnforced) {
  const auto net = dimer(100000);
  EXPECT_THROW(build_lattice(net, GridMode::full), ConfigError);
  EXPECT_NO_THROW(build_lattice(net, GridMode::logarithmic));
}

TEST(Stencil, WeightsFormPartitionOfUnity) {
  Lattice lat(GridMode::logarithmic, {log_nodes(5000, 20), log_nodes(300, 10)});
  for (std::int64_t a : {0, 7, 17, 333, 4999})
    for (std::int64_t b : {0, 3, 40, 299}) {
      const State x{a, b};
      const auto st = interpolation_stencil(lat, x);
      double w = 0.0;
      for (double v : st.weight) {
        EXPECT_GE(v, 0.0);
        w += v;
      }
      EXPECT_NEAR(w, 1.0, 1e-14);
      EXPECT_FALSE(st.clamped);
    }
  const State out{6000, 2};
  EXPECT_TRUE(interpolation_stencil(lat, out).clamped);
}

TEST(Stencil, DifferenceRuleIsExactForCubics) {
  Lattice lat(GridMode::logarithmic, {log_nodes(100000, 30)});
  const auto& nodes = lat.nodes(0);
  for (std::int64_t x : {20, 555, 4321, 99999}) {
    const State p{x};
    const auto st = difference_stencil(lat, p);
    double v = 0.0, w = 0.0;
    for (std::size_t s = 0; s < st.index.size(); ++s) {
      const double n = static_cast<double>(nodes[st.index[s]]);
      v += st.weight[s] * n * n * n;
      w += st.weight[s];
    }
    EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_NEAR(v / (1.0 * x * x * x), 1.0, 1e-9);
  }
}

TEST(Generator, ConservesConstantsAndMatchesFormula) {
  const auto net = decay(5, 0.7);
  const Lattice lat(GridMode::full, {{0, 1, 2, 3, 4, 5}});
  const std::vector<double> ones(6, 1.0);
  for (double v : apply_generator(net, lat, ones)) EXPECT_NEAR(v, 0.0, 1e-15);
  std::vector<double> x(6);
  for (int k = 0; k < 6; ++k) x[k] = k;
  const auto ax = apply_generator(net, lat, x);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(ax[k], -0.7 * k, 1e-12);
}

TEST(Kbe, DecayMatchesAnalyticMean) {
  const auto net = decay(10, 0.2);
  const auto start = std::chrono::steady_clock::now();
  KbeOptions o;
  o.tol = 1e-8;
  const auto vf = solve_backward(net, Observable::total(1), {0.0, 0.5, 1.0}, o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 1.0);
  for (double t : {0.0, 0.5, 1.0})
    for (std::int64_t x = 0; x <= 10; ++x) {
      const State s{x};
      EXPECT_NEAR(query_value(vf, s, t), x * std::exp(-0.2 * (1 - t)), 1e-6) << x << " " << t;
    }
}

TEST(Kbe, DecaySecondMoment) {
  const auto net = decay(20, 1.5);
  const auto vf = solve_backward(net, Observable::monomial(1, 0, 2), {0.0, 1.0});
  for (std::int64_t x : {0, 1, 7, 20}) {
    const State s{x};
    EXPECT_NEAR(query_value(vf, s, 0.0), binomial_second_moment(x, std::exp(-1.5)), 1e-6);
  }
}

TEST(Kbe, DiscreteDifferenceOnDecay) {
  const auto net = decay(10, 0.2);
  const auto vf = solve_backward(net, Observable::total(1), {0.0, 1.0});
  const State s{6};
  EXPECT_NEAR(discrete_difference(vf, s, 0.0, 0), -std::exp(-0.2), 1e-6);
  EXPECT_THROW(discrete_difference(vf, s, 0.0, 3), ConfigError);
  EXPECT_THROW(vf.snapshot(0.3), ConfigError);
  EXPECT_TRUE(vf.has_snapshot(1.0));
}

TEST(Kbe, DimerAgreesWithSsa) {
  const auto net = dimer(30);
  const Observable g = Observable::monomial(3, 1, 1);
  const auto vf = solve_backward(net, g, {0.0, 1.0});
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    RngStream r(99, static_cast<std::uint64_t>(k));
    const double v = static_cast<double>(ssa_terminal(net, net.initial_state, 1.0, r).state[1]);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(query_value(vf, net.initial_state, 0.0), mean, 4 * se);
}

TEST(Kbe, LogGridOnLargeDecay) {
  const auto net = decay(1000000, 1.0);
  KbeOptions o;
  o.mode = GridMode::logarithmic;
  const auto vf = solve_backward(net, Observable::total(1), {0.0, 1.0}, o);
  const double exact = 1e6 * std::exp(-1.0);
  EXPECT_NEAR(query_value(vf, net.initial_state, 0.0) / exact, 1.0, 1e-4);
  // Off-grid queries interpolate linearly in log(1+x).
  RngStream r(31, 0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const State x{16 + static_cast<std::int64_t>(r.uniform() * (1e6 - 16))};
    const double v = query_value(vf, x, 0.0), truth = x[0] * std::exp(-1.0);
    worst = std::max(worst, std::abs(v / truth - 1.0));
  }
  EXPECT_LT(worst, 5e-3);
  const State on{7};
  EXPECT_NEAR(discrete_difference(vf, on, 0.0, 0), -std::exp(-1.0), 1e-6);
  const State wide{123457};
  EXPECT_NEAR(discrete_difference(vf, wide, 0.0, 0), -std::exp(-1.0), 1e-6);
}

TEST(Kbe, RejectsInvalidNetworkUnlessAllowed) {
  const auto net = constant_pair();
  EXPECT_THROW(solve_backward(net, Observable::total(2), {0.0, 1.0}), ConfigError);
  KbeOptions o;
  o.allow_invalid = true;
  auto small = net;
  small.state_bounds = {40, 40};
  EXPECT_NO_THROW(solve_backward(small, Observable::total(2), {0.0, 1.0}, o));
}

TEST(Kbe, SnapshotsMustIncludeFinalTime) {
  const auto net = decay(10, 0.2);
  EXPECT_THROW(solve_backward(net, Observable::total(1), {0.0, 0.5}), ConfigError);
}

TEST(Archive, RoundTrip) {
  const auto net = dimer(12);
  const auto vf = solve_backward(net, Observable::total(3), {0.0, 0.25, 1.0});
  std::stringstream buf;
  write_archive(vf, buf);
  const auto back = read_archive(buf);
  EXPECT_EQ(back.times, vf.times);
  EXPECT_EQ(back.values, vf.values);
  EXPECT_EQ(back.lattice.all_nodes(), vf.lattice.all_nodes());
  EXPECT_EQ(back.stoichiometry, vf.stoichiometry);
  EXPECT_EQ(back.inner_steps, vf.inner_steps);
  EXPECT_EQ(back.observable.terms.size(), vf.observable.terms.size());
}

TEST(Archive, RejectsGarbage) {
  std::stringstream bad("NOTANARCHIVE....");
  EXPECT_THROW(read_archive(bad), ConfigError);
  const auto vf = solve_backward(decay(4, 1.0), Observable::total(1), {0.0, 1.0});
  std::stringstream buf;
  write_archive(vf, buf);
  const std::string full = buf.str();
  std::stringstream cut(full.substr(0, full.size() / 2));
  EXPECT_THROW(read_archive(cut), ConfigError);
}
