#include "tauleap/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::lhs_approx: return "lhs_approx";
    case EstimatorKind::rhs: return "rhs";
    case EstimatorKind::rhs_dual: return "rhs_dual";
  }
  return "?";
}

EstimatorKind estimator_from_string(const std::string& text) {
  if (text == "lhs_approx") return EstimatorKind::lhs_approx;
  if (text == "rhs") return EstimatorKind::rhs;
  if (text == "rhs_dual") return EstimatorKind::rhs_dual;
  throw ConfigError("unknown estimator '" + text + "' (expected lhs_approx, rhs or rhs_dual)");
}

std::string to_string(WeightTime w) { return w == WeightTime::at_n ? "at-n" : "at-n-plus-1"; }

std::vector<double> ErrorEstimate::interval_density() const {
  std::vector<double> rho(intervals(), 0.0);
  for (std::size_t n = 0; n < rho.size(); ++n)
    for (std::size_t j = 0; j < channels; ++j) rho[n] += density[n * channels + j];
  return rho;
}

// Per-path primitives -------------------------------------------------------------

LhsSample lhs_approx_sample(const ReactionNetwork& net, const Observable& g,
                            const std::vector<double>& base_grid, RngStream& rng,
                            const LeapControl& leap) {
  const BridgePath coarse = bridge_tau_leap_path(net, net.initial_state, base_grid, rng, leap);
  const Trajectory fine = coupled_refined_path(net, coarse, rng);
  LhsSample s;
  s.coarse_observable = g.value(coarse.trajectory.terminal_state());
  s.value = 2.0 * (g.value(fine.terminal_state()) - s.coarse_observable);
  s.coarse_steps = coarse.trajectory.steps();
  return s;
}

double rhs_contributions(const ReactionNetwork& net, const Trajectory& path, const ValueFunction& vf,
                         std::span<double> bins) {
  const std::size_t m = net.channels();
  const auto& grid = path.base_grid();
  std::vector<double> a_cur(m), a_next(m);
  double total = 0.0;
  if (path.steps() > 0) propensities(net, path.state(0), a_cur);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    propensities(net, path.state(k + 1), a_next);
    const std::size_t n = path.base_interval(k);
    const double t_star = grid[n + 1];
    const double half_tau = 0.5 * path.step_size(k);
    for (std::size_t j = 0; j < m; ++j) {
      const double da = a_next[j] - a_cur[j];
      if (da == 0.0) continue;
      const double c = half_tau * da * discrete_difference(vf, path.state(k + 1), t_star, j);
      bins[n * m + j] += c;
      total += c;
    }
    a_cur.swap(a_next);
  }
  return total;
}

double rhs_dual_contributions(const ReactionNetwork& net, const Trajectory& path,
                              const DualWeights& dual, WeightTime weight_time, std::span<double> bins) {
  const std::size_t m = net.channels();
  const std::size_t d = net.dim();
  std::vector<double> a_cur(m), a_next(m);
  double total = 0.0;
  if (path.steps() > 0) propensities(net, path.state(0), a_cur);
  for (std::size_t k = 0; k < path.steps(); ++k) {
    propensities(net, path.state(k + 1), a_next);
    const std::size_t n = path.base_interval(k);
    const double half_tau = 0.5 * path.step_size(k);
    const auto phi = dual.phi(weight_time == WeightTime::at_n_plus_1 ? k + 1 : k);
    for (std::size_t j = 0; j < m; ++j) {
      const double da = a_next[j] - a_cur[j];
      if (da == 0.0) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += phi[i] * net.reactions[j].nu[i];
      const double c = half_tau * da * dot;
      bins[n * m + j] += c;
      total += c;
    }
    a_cur.swap(a_next);
  }
  return total;
}

// Estimators ---------------------------------------------------------------------------

namespace {

MonteCarloResult run(const PathFunctional& f, std::size_t aux, const StopRule& stop,
                     const EstimatorOptions& options) {
  if (options.fixed_paths > 0) return mc_fixed(f, aux, options.fixed_paths, stop.workers);
  return mc_mean(f, aux, stop);
}

double max_step(const std::vector<double>& grid) {
  double tau = 0.0;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) tau = std::max(tau, grid[n + 1] - grid[n]);
  return tau;
}

ErrorEstimate base_estimate(EstimatorKind kind, const ReactionNetwork& net,
                            const std::vector<double>& grid, const EstimatorOptions& options,
                            MonteCarloResult&& r) {
  ErrorEstimate e;
  e.kind = kind;
  e.value = r.mean;
  e.standard_error = r.standard_error;
  e.n_samples = r.n_samples;
  e.converged = r.converged;
  e.seed = options.seed;
  e.tau_max = max_step(grid);
  e.base_grid = grid;
  e.channels = net.channels();
  e.samples = std::move(r.samples);
  return e;
}

// Fills densities from binned aux means laid out as [N*M bins, steps].
ErrorEstimate binned_estimate(EstimatorKind kind, const ReactionNetwork& net,
                              const std::vector<double>& grid, const EstimatorOptions& options,
                              MonteCarloResult&& r) {
  const std::size_t m = net.channels();
  const std::size_t intervals = grid.size() - 1;
  std::vector<double> aux = std::move(r.aux_mean);
  ErrorEstimate e = base_estimate(kind, net, grid, options, std::move(r));
  e.signed_density.assign(intervals * m, 0.0);
  e.density.assign(intervals * m, 0.0);
  for (std::size_t n = 0; n < intervals; ++n) {
    const double tau = grid[n + 1] - grid[n];
    for (std::size_t j = 0; j < m; ++j) {
      e.signed_density[n * m + j] = aux[n * m + j] / (tau * tau);
      e.density[n * m + j] = std::abs(e.signed_density[n * m + j]);
    }
  }
  e.mean_steps = aux[intervals * m];
  return e;
}

}  // namespace

ErrorEstimate lhs_approx_estimate(const ReactionNetwork& net, const Observable& g,
                                  const std::vector<double>& base_grid, const StopRule& stop,
                                  const EstimatorOptions& options) {
  check_grid(base_grid, net.final_time);
  PathFunctional f = [&](std::uint64_t index, std::span<double> aux) {
    RngStream rng(options.seed, index);
    const LhsSample s = lhs_approx_sample(net, g, base_grid, rng, options.leap);
    aux[0] = s.coarse_observable;
    aux[1] = static_cast<double>(s.coarse_steps);
    return s.value;
  };
  StopRule lhs_stop = stop;
  lhs_stop.min_samples = std::max(stop.min_samples, options.lhs_min_samples);
  lhs_stop.max_samples = std::max(lhs_stop.max_samples, lhs_stop.min_samples);
  MonteCarloResult r = run(f, 2, lhs_stop, options);
  const double coarse_mean = r.aux_mean[0];
  const double steps = r.aux_mean[1];
  ErrorEstimate e = base_estimate(EstimatorKind::lhs_approx, net, base_grid, options, std::move(r));
  e.coarse_observable_mean = coarse_mean;
  e.mean_steps = steps;
  return e;
}

ErrorEstimate rhs_estimate(const ReactionNetwork& net, const std::vector<double>& base_grid,
                           const ValueFunction& vf, const StopRule& stop,
                           const EstimatorOptions& options) {
  check_grid(base_grid, net.final_time);
  for (double t : base_grid)
    if (!vf.has_snapshot(t)) {
      std::ostringstream os;
      os << "value function has no snapshot at base-grid time " << t;
      throw ConfigError(os.str());
    }
  if (vf.stoichiometry.size() != net.channels())
    throw ConfigError("value function was computed for a different network");
  const std::size_t bins = (base_grid.size() - 1) * net.channels();
  PathFunctional f = [&](std::uint64_t index, std::span<double> aux) {
    RngStream rng(options.seed, index);
    const BridgePath bp = bridge_tau_leap_path(net, net.initial_state, base_grid, rng, options.leap);
    aux[bins] = static_cast<double>(bp.trajectory.steps());
    return rhs_contributions(net, bp.trajectory, vf, aux.first(bins));
  };
  return binned_estimate(EstimatorKind::rhs, net, base_grid, options, run(f, bins + 1, stop, options));
}

ErrorEstimate rhs_dual_estimate(const ReactionNetwork& net, const Observable& g,
                                const std::vector<double>& base_grid, const StopRule& stop,
                                const EstimatorOptions& options) {
  check_grid(base_grid, net.final_time);
  const std::size_t bins = (base_grid.size() - 1) * net.channels();
  DualOptions dual_options = options.dual;
  dual_options.store_jacobians = false;
  PathFunctional f = [&](std::uint64_t index, std::span<double> aux) {
    RngStream rng(options.seed, index);
    const BridgePath bp = bridge_tau_leap_path(net, net.initial_state, base_grid, rng, options.leap);
    const DualWeights dual = backward_dual_weights(net, bp.trajectory, g, dual_options);
    aux[bins] = static_cast<double>(bp.trajectory.steps());
    return rhs_dual_contributions(net, bp.trajectory, dual, options.weight_time, aux.first(bins));
  };
  return binned_estimate(EstimatorKind::rhs_dual, net, base_grid, options,
                         run(f, bins + 1, stop, options));
}

ErrorEstimate error_density(const ReactionNetwork& net, const Observable& g,
                            const std::vector<double>& base_grid, const StopRule& stop,
                            const DensitySource& source, const EstimatorOptions& options) {
  if (source.kind == DensitySource::Kind::true_dual) {
    if (!source.vf) throw ConfigError("true-dual density requires a value function");
    return rhs_estimate(net, base_grid, *source.vf, stop, options);
  }
  return rhs_dual_estimate(net, g, base_grid, stop, options);
}

// Work models ----------------------------------------------------------------------------

WorkReport work_estimates(const std::vector<double>& base_grid, std::span<const double> rho,
                          double current_work, double error_scale) {
  if (rho.size() + 1 != base_grid.size()) throw ConfigError("density length does not match the grid");
  WorkReport w;
  w.current_work = current_work;
  const double T = base_grid.back() - base_grid.front();
  double root_sum = 0.0, sum = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    if (rho[n] < 0.0) throw ArgumentError("error densities must be nonnegative");
    const double tau = base_grid[n + 1] - base_grid[n];
    root_sum += std::sqrt(rho[n]) * tau;
    sum += rho[n] * tau;
  }
  w.optimal_raw = root_sum * root_sum;
  w.uniform_raw = T * sum;
  w.error_scale = error_scale;
  w.degenerate = sum == 0.0 || error_scale == 0.0;
  if (!w.degenerate) {
    w.optimal_work = w.optimal_raw / error_scale;
    w.uniform_work = w.uniform_raw / error_scale;
  }
  return w;
}

WorkReport work_report(const ErrorEstimate& density, std::string variant) {
  const auto rho = density.interval_density();
  WorkReport w = work_estimates(density.base_grid, rho, density.mean_steps, std::abs(density.value));
  w.variant = std::move(variant);
  return w;
}

// Work comparison --------------------------------------------------------------------------

int step_exponent(const ReactionNetwork& net) {
  int delta = 0;
  for (const auto& r : net.reactions) delta = std::max(delta, 2 * r.order() - 2);
  return delta;
}

ReactionNetwork scaled_network(const ReactionNetwork& base, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("scale factor gamma must be positive");
  ReactionNetwork net = base;
  for (auto& x : net.initial_state) x = std::llround(gamma * static_cast<double>(x));
  for (std::size_t i = 0; i < net.state_bounds.size(); ++i)
    net.state_bounds[i] = std::max(std::llround(gamma * static_cast<double>(net.state_bounds[i])),
                                   static_cast<long long>(net.initial_state[i]));
  std::ostringstream os;
  os << base.name << "@gamma=" << gamma;
  net.name = os.str();
  return net;
}

std::vector<WorkComparisonRow> work_comparison_experiment(const ReactionNetwork& base,
                                                          const Observable& g,
                                                          const WorkComparisonOptions& options) {
  if (!(options.h > 0.0)) throw ConfigError("work comparison needs h > 0");
  const int delta = step_exponent(base);
  std::vector<WorkComparisonRow> rows;
  for (double gamma : options.gammas) {
    const ReactionNetwork net = scaled_network(base, gamma);
    WorkComparisonRow row;
    row.gamma = gamma;
    row.tau = options.h * std::pow(gamma, -delta);
    const auto steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(net.final_time / row.tau)));
    const auto grid = uniform_grid(net.final_time, steps);

    EstimatorOptions eo;
    eo.seed = options.seed;
    const ErrorEstimate lhs = lhs_approx_estimate(net, g.scaled(gamma), grid, options.stop, eo);
    row.work_tl = lhs.mean_steps;
    row.lhs_samples = lhs.n_samples;
    const double scale = std::abs(lhs.coarse_observable_mean);
    row.relative_error = scale > 0.0 ? lhs.value / scale : 0.0;
    row.relative_error_se = scale > 0.0 ? lhs.standard_error / scale : 0.0;

    // SSA streams are offset so they never coincide with tau-leap streams.
    constexpr std::uint64_t kSsaOffset = std::uint64_t{1} << 40;
    PathFunctional ssa = [&](std::uint64_t index, std::span<double>) {
      RngStream rng(options.seed, kSsaOffset + index);
      return static_cast<double>(ssa_terminal(net, net.initial_state, net.final_time, rng).jumps);
    };
    const auto jumps = mc_fixed(ssa, 0, options.ssa_paths, options.stop.workers);
    row.work_ssa = jumps.mean;
    row.ssa_paths = jumps.n_samples;
    row.ratio = row.work_tl > 0.0 ? row.work_ssa / row.work_tl : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tauleap
