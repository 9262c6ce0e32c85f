#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tauleap/error.hpp"
#include "tauleap/montecarlo.hpp"
#include "tauleap/rng.hpp"

using namespace tauleap;

namespace {
PathFunctional normal_draws(double mean, double sd) {
  return [=](std::uint64_t i, std::span<double> aux) {
    RngStream r(77, i);
    const double v = sample_normal(mean, sd, r);
    if (!aux.empty()) aux[0] = 2 * v;
    return v;
  };
}
}  // namespace

TEST(SampleStats, Example) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = sample_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.standard_error, std::sqrt(5.0 / 12.0));
}

TEST(MonteCarlo, FixedRunAveragesAux) {
  const auto r = mc_fixed(
      [](std::uint64_t i, std::span<double> aux) {
        aux[0] = 1.0;
        aux[1] = static_cast<double>(i);
        return static_cast<double>(i);
      },
      2, 100, 3);
  EXPECT_EQ(r.n_samples, 100u);
  EXPECT_DOUBLE_EQ(r.mean, 49.5);
  EXPECT_DOUBLE_EQ(r.aux_mean[0], 1.0);
  EXPECT_DOUBLE_EQ(r.aux_mean[1], 49.5);
  for (std::size_t k = 0; k < 100; ++k) EXPECT_EQ(r.samples[k], static_cast<double>(k));
}

TEST(MonteCarlo, StopRuleReachesTarget) {
  StopRule stop;
  const auto r = mc_mean(normal_draws(1.0, 1.0), 1, stop);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(stop.z * r.standard_error, stop.rel_target * std::abs(r.mean));
  EXPECT_GT(r.n_samples, 300u);
  EXPECT_LT(r.n_samples, 1000u);
  EXPECT_NEAR(r.aux_mean[0], 2 * r.mean, 1e-12);
}

TEST(MonteCarlo, ResultIndependentOfWorkers) {
  StopRule one, many;
  many.workers = 4;
  const auto a = mc_mean(normal_draws(0.3, 1.0), 1, one);
  const auto b = mc_mean(normal_draws(0.3, 1.0), 1, many);
  EXPECT_EQ(a.n_samples, b.n_samples);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.aux_mean, b.aux_mean);
}

TEST(MonteCarlo, CapsAtMaxSamples) {
  StopRule stop;
  stop.max_samples = 5000;
  const auto r = mc_mean(normal_draws(0.0, 1.0), 0, stop);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.n_samples, 5000u);
}

TEST(MonteCarlo, ZeroVarianceZeroMeanCountsAsConverged) {
  const auto r = mc_mean([](std::uint64_t, std::span<double>) { return 0.0; }, 0, StopRule{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.n_samples, 100u);
  EXPECT_EQ(r.mean, 0.0);
}

TEST(MonteCarlo, InvalidRulesAndPropagatedErrors) {
  StopRule bad;
  bad.min_samples = 1;
  EXPECT_THROW(mc_mean(normal_draws(1, 1), 0, bad), ConfigError);
  StopRule flipped;
  flipped.max_samples = 10;
  EXPECT_THROW(mc_mean(normal_draws(1, 1), 0, flipped), ConfigError);
  StopRule threaded;
  threaded.workers = 3;
  EXPECT_THROW(mc_mean(
                   [](std::uint64_t i, std::span<double>) -> double {
                     if (i == 57) throw NumericalError("boom");
                     return 1.0;
                   },
                   0, threaded),
               NumericalError);
}

TEST(Efficiency, RatioAndBootstrapInterval) {
  std::vector<double> lhs, rhs;
  for (int k = 0; k < 2000; ++k) {
    RngStream r(5, static_cast<std::uint64_t>(k));
    const double v = sample_normal(1.0, 0.2, r);
    rhs.push_back(v);
    lhs.push_back(2 * v);
  }
  const auto e = efficiency_index(lhs, rhs);
  EXPECT_NEAR(e.index, 2.0, 1e-12);
  EXPECT_FALSE(e.unstable);
  EXPECT_LT(e.ci_low, e.ci_high);
  EXPECT_LT(e.ci_low, 2.05);
  EXPECT_GT(e.ci_high, 1.95);
}

TEST(Efficiency, UnstableWhenDenominatorStraddlesZero) {
  std::vector<double> lhs{1, 2, 3}, rhs{-1, 1, -1, 1};
  const auto e = efficiency_index(lhs, rhs);
  EXPECT_TRUE(e.unstable);
  EXPECT_TRUE(std::isinf(e.ci_high));
  EXPECT_THROW(efficiency_index({}, rhs), ArgumentError);
}
