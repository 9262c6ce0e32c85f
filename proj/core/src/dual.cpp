#include "tauleap/dual.hpp"

#include <cmath>

#include "tauleap/error.hpp"

namespace tauleap {

double wiener_increment(double a, double tau, std::int64_t increment) {
  if (!(a > 0.0)) throw ArgumentError("Wiener increment needs a positive propensity");
  return (static_cast<double>(increment) - tau * a) / std::sqrt(a);
}

namespace {

void apply_variation(const Eigen::MatrixXd& grads, const ReactionNetwork& net,
                     std::span<const double> weights, std::span<const double> phi_next,
                     std::span<double> phi_out, DualOrientation orientation) {
  const std::size_t d = phi_next.size();
  std::copy(phi_next.begin(), phi_next.end(), phi_out.begin());
  for (std::size_t j = 0; j < net.channels(); ++j) {
    const double w = weights[j];
    if (w == 0.0) continue;
    const auto& nu = net.reactions[j].nu;
    if (orientation == DualOrientation::transposed) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += nu[i] * phi_next[i];
      if (dot == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) phi_out[k] += w * grads(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * dot;
    } else {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        dot += grads(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * phi_next[k];
      if (dot == 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) phi_out[i] += w * nu[i] * dot;
    }
  }
}

}  // namespace

Eigen::MatrixXd variation_matrix(const ReactionNetwork& net, std::span<const std::int64_t> state,
                                 double tau, std::span<const std::int64_t> increments,
                                 bool zero_noise) {
  const auto d = static_cast<Eigen::Index>(net.dim());
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t j = 0; j < net.channels(); ++j) {
    const auto& r = net.reactions[j];
    const double a = propensity(r, state);
    if (a <= 0.0) continue;
    const double w =
        zero_noise ? tau : tau + wiener_increment(a, tau, increments[j]) / (2.0 * std::sqrt(a));
    const auto grad = propensity_gradient(r, state);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index k = 0; k < d; ++k)
        J(i, k) += w * r.nu[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(k)];
  }
  return J;
}

DualWeights backward_dual_weights(const ReactionNetwork& net, const Trajectory& path,
                                  const Observable& g, const DualOptions& options) {
  const std::size_t d = net.dim();
  const std::size_t m = net.channels();
  const std::size_t steps = path.steps();
  DualWeights out;
  out.dim = d;
  out.channels = m;
  out.times = path.times();
  out.phi_data.assign((steps + 1) * d, 0.0);
  out.wiener_data.assign(steps * m, 0.0);
  if (options.store_jacobians) out.jacobians.resize(steps);

  const auto terminal = g.gradient(path.terminal_state());
  std::copy(terminal.begin(), terminal.end(), out.phi_data.begin() + static_cast<std::ptrdiff_t>(steps * d));

  Eigen::MatrixXd grads(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  std::vector<double> weights(m);
  for (std::size_t n = steps; n-- > 0;) {
    const auto x = path.state(n);
    const auto inc = path.increments(n);
    const double tau = path.step_size(n);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& r = net.reactions[j];
      const double a = propensity(r, x);
      if (a <= 0.0) {
        weights[j] = 0.0;
        continue;
      }
      const double dw = wiener_increment(a, tau, inc[j]);
      out.wiener_data[n * m + j] = dw;
      weights[j] = options.zero_noise ? tau : tau + dw / (2.0 * std::sqrt(a));
      const auto grad = propensity_gradient(r, x);
      for (std::size_t k = 0; k < d; ++k)
        grads(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = grad[k];
    }
    if (options.store_jacobians) {
      Eigen::MatrixXd J = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < m; ++j) {
        if (weights[j] == 0.0) continue;
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t k = 0; k < d; ++k)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) +=
                weights[j] * net.reactions[j].nu[i] * grads(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      }
      out.jacobians[n] = std::move(J);
    }
    std::span<const double> next(out.phi_data.data() + (n + 1) * d, d);
    std::span<double> cur(out.phi_data.data() + n * d, d);
    apply_variation(grads, net, weights, next, cur, options.orientation);
  }
  return out;
}

std::vector<double> euler_mean_field(const ReactionNetwork& net, std::span<const double> x0,
                                     const std::vector<double>& grid) {
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> drift(x.size());
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double tau = grid[n + 1] - grid[n];
    std::fill(drift.begin(), drift.end(), 0.0);
    for (const auto& r : net.reactions) {
      const double a = extend_propensity_smooth(r, x).value;
      for (std::size_t i = 0; i < x.size(); ++i) drift[i] += r.nu[i] * a;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += tau * drift[i];
  }
  return x;
}

std::vector<double> mean_field_dual(const ReactionNetwork& net, std::span<const double> x0,
                                    const std::vector<double>& grid, const Observable& g,
                                    DualOrientation orientation) {
  const std::size_t d = net.dim();
  const std::size_t m = net.channels();
  const std::size_t steps = grid.size() - 1;
  std::vector<std::vector<double>> states{std::vector<double>(x0.begin(), x0.end())};
  for (std::size_t n = 0; n < steps; ++n)
    states.push_back(euler_mean_field(net, states.back(), {grid[n], grid[n + 1]}));

  std::vector<double> phi = g.gradient(std::span<const double>(states.back()));
  std::vector<double> next(d);
  Eigen::MatrixXd grads(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  std::vector<double> weights(m);
  for (std::size_t n = steps; n-- > 0;) {
    const double tau = grid[n + 1] - grid[n];
    for (std::size_t j = 0; j < m; ++j) {
      const auto& r = net.reactions[j];
      weights[j] = extend_propensity_smooth(r, states[n]).value > 0.0 ? tau : 0.0;
      const auto grad = propensity_gradient(r, std::span<const double>(states[n]));
      for (std::size_t k = 0; k < d; ++k)
        grads(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = grad[k];
    }
    next = phi;
    apply_variation(grads, net, weights, next, phi, orientation);
  }
  return phi;
}

}  // namespace tauleap
