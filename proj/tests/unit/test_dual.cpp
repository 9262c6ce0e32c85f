#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tauleap/dual.hpp"
#include "tauleap/error.hpp"
#include "test_networks.hpp"

using namespace tauleap;
using tauleap::testing::decay;
using tauleap::testing::dimer;

TEST(Wiener, Example) {
  EXPECT_DOUBLE_EQ(wiener_increment(4.0, 0.5, 3), 0.5);
  EXPECT_DOUBLE_EQ(wiener_increment(1.0, 2.0, 2), 0.0);
  EXPECT_THROW(wiener_increment(0.0, 0.5, 0), ArgumentError);
}

TEST(VariationMatrix, DecayScalar) {
  const auto net = decay(10, 0.2);
  const State x{10};
  const std::vector<std::int64_t> inc{3};
  const double a = 2.0, tau = 0.5;
  const double w = tau + wiener_increment(a, tau, 3) / (2 * std::sqrt(a));
  EXPECT_NEAR(variation_matrix(net, x, tau, inc)(0, 0), 1 - 0.2 * w, 1e-14);
  EXPECT_NEAR(variation_matrix(net, x, tau, inc, true)(0, 0), 1 - 0.2 * tau, 1e-14);
  EXPECT_NEAR(variation_matrix(net, x, 0.025, inc, true)(0, 0), 0.995, 1e-14);
}

TEST(VariationMatrix, SkipsSilentChannels) {
  const auto net = dimer(100);
  const State x{1, 0, 0};
  const std::vector<std::int64_t> inc{0, 0, 0, 0};
  const auto J = variation_matrix(net, x, 0.1, inc);
  // Only channel 0 fires at (1,0,0); its gradient is (1,0,0).
  const double a = 1.0, w = 0.1 + wiener_increment(a, 0.1, 0) / 2.0;
  EXPECT_NEAR(J(0, 0), 1 - w, 1e-14);
  EXPECT_NEAR(J(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(J(2, 2), 1.0, 1e-14);
}

TEST(BackwardDual, ZeroNoiseDecayIsPowerLaw) {
  const auto net = decay(1000, 1.0);
  const auto grid = uniform_grid(1.0, 8);
  RngStream r(1, 0);
  const auto path = tau_leap_path(net, net.initial_state, grid, r);
  DualOptions o;
  o.zero_noise = true;
  const auto dual = backward_dual_weights(net, path, Observable::total(1), o);
  for (std::size_t n = 0; n <= 8; ++n)
    EXPECT_NEAR(dual.phi(n)[0], std::pow(1 - 1.0 / 8, 8 - static_cast<double>(n)), 1e-12);
}

TEST(BackwardDual, OrientationsMatchExplicitProducts) {
  const auto net = dimer(2000);
  RngStream r(4, 2);
  const auto path = tau_leap_path(net, net.initial_state, uniform_grid(1.0, 6), r);
  const Observable g = Observable::monomial(3, 1, 2);
  for (auto orient : {DualOrientation::transposed, DualOrientation::literal}) {
    DualOptions o;
    o.orientation = orient;
    o.store_jacobians = true;
    const auto dual = backward_dual_weights(net, path, g, o);
    ASSERT_EQ(dual.jacobians.size(), path.steps());
    const auto xT = path.terminal_state();
    const auto grad = g.gradient(xT);
    Eigen::VectorXd phi = Eigen::Map<const Eigen::VectorXd>(grad.data(), 3);
    for (std::size_t n = path.steps(); n-- > 0;) {
      phi = orient == DualOrientation::transposed ? Eigen::VectorXd(dual.jacobians[n].transpose() * phi)
                                                  : Eigen::VectorXd(dual.jacobians[n] * phi);
      for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(dual.phi(n)[i], phi(static_cast<Eigen::Index>(i)), 1e-9 * (1 + std::abs(phi(i))));
    }
  }
}

TEST(BackwardDual, WienerRecordsAreZeroForSilentChannels) {
  const auto net = decay(1, 30.0);
  RngStream r(2, 0);
  const auto path = tau_leap_path(net, net.initial_state, uniform_grid(1.0, 4), r);
  const auto dual = backward_dual_weights(net, path, Observable::total(1));
  for (std::size_t n = 0; n < path.steps(); ++n)
    if (path.state(n)[0] == 0) {
      EXPECT_EQ(dual.wiener(n)[0], 0.0);
    }
}

TEST(MeanField, DualIsGradientOfEulerMap) {
  const auto net = dimer(1000);
  const std::vector<double> x0{1000.0, 40.0, 5.0};
  const auto grid = uniform_grid(1.0, 20);
  const Observable g = Observable::monomial(3, 1, 2);
  const auto phi = mean_field_dual(net, x0, grid, g);
  for (std::size_t i = 0; i < 3; ++i) {
    const double h = 1e-3;
    auto xp = x0, xm = x0;
    xp[i] += h;
    xm[i] -= h;
    const auto fp = euler_mean_field(net, xp, grid), fm = euler_mean_field(net, xm, grid);
    const double fd = (g.value(std::span<const double>(fp)) - g.value(std::span<const double>(fm))) / (2 * h);
    EXPECT_NEAR(phi[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(MeanField, DecayEuler) {
  const auto net = decay(100, 2.0);
  const std::vector<double> x0{100.0};
  const auto xT = euler_mean_field(net, x0, uniform_grid(1.0, 10));
  EXPECT_NEAR(xT[0], 100 * std::pow(0.8, 10), 1e-9);
}
