#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tauleap/model.hpp"
#include "tauleap/simulate.hpp"

namespace tauleap {

/// Approximate Wiener increment (dY - tau a) / sqrt(a); requires a > 0.
double wiener_increment(double a, double tau, std::int64_t increment);

/// First-variation matrix J = I + sum_{j: a_j > 0} w_j nu_j grad(a_j)^T with
/// w_j = tau + dW_j / (2 sqrt(a_j)), or w_j = tau when zero_noise is set.
Eigen::MatrixXd variation_matrix(const ReactionNetwork& net, std::span<const std::int64_t> state,
                                 double tau, std::span<const std::int64_t> increments,
                                 bool zero_noise = false);

enum class DualOrientation {
  transposed,  ///< phi_n = J^T phi_{n+1}
  literal,     ///< phi_n = J phi_{n+1}
};

struct DualOptions {
  DualOrientation orientation = DualOrientation::transposed;
  bool zero_noise = false;
  bool store_jacobians = false;
};

struct DualWeights {
  std::size_t dim = 0;
  std::size_t channels = 0;
  std::vector<double> times;
  /// phi at times[n], flat with stride dim.
  std::vector<double> phi_data;
  /// Per-step Wiener increments, flat with stride channels (zero where a_j = 0).
  std::vector<double> wiener_data;
  /// Per-step first-variation matrices when requested.
  std::vector<Eigen::MatrixXd> jacobians;

  std::span<const double> phi(std::size_t n) const { return {phi_data.data() + n * dim, dim}; }
  std::span<const double> wiener(std::size_t n) const {
    return {wiener_data.data() + n * channels, channels};
  }
};

/// Backward recursion phi_T = grad g(X_T), phi_n = J_n (or J_n^T) phi_{n+1}
/// on the realized steps of the trajectory.
DualWeights backward_dual_weights(const ReactionNetwork& net, const Trajectory& path,
                                  const Observable& g, const DualOptions& options = {});

/// Deterministic Euler map of the mean-field equation, dx = sum_j nu_j a_j(x) dt,
/// using the smooth propensity extension.
std::vector<double> euler_mean_field(const ReactionNetwork& net, std::span<const double> x0,
                                     const std::vector<double>& grid);

/// phi_0 for the deterministic Euler path of euler_mean_field (all dW = 0).
std::vector<double> mean_field_dual(const ReactionNetwork& net, std::span<const double> x0,
                                    const std::vector<double>& grid, const Observable& g,
                                    DualOrientation orientation = DualOrientation::transposed);

}  // namespace tauleap
