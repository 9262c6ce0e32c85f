#include "tauleap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

Trajectory::Trajectory(std::size_t dim, std::size_t channels, std::vector<double> base_grid)
    : dim_(dim), channels_(channels), base_grid_(std::move(base_grid)) {}

void Trajectory::start(double t0, std::span<const std::int64_t> x0) {
  times_.assign(1, t0);
  state_data_.assign(x0.begin(), x0.end());
  increment_data_.clear();
  halved_.clear();
  base_interval_.clear();
  halvings_ = 0;
  went_negative_ = std::any_of(x0.begin(), x0.end(), [](std::int64_t v) { return v < 0; });
}

void Trajectory::push(double t, std::span<const std::int64_t> x,
                      std::span<const std::int64_t> increments, bool halved,
                      std::size_t base_interval) {
  times_.push_back(t);
  state_data_.insert(state_data_.end(), x.begin(), x.end());
  increment_data_.insert(increment_data_.end(), increments.begin(), increments.end());
  halved_.push_back(halved ? 1 : 0);
  base_interval_.push_back(base_interval);
  if (std::any_of(x.begin(), x.end(), [](std::int64_t v) { return v < 0; })) went_negative_ = true;
}

std::vector<double> uniform_grid(double final_time, std::size_t steps) {
  if (steps == 0) throw ConfigError("a time grid needs at least one step");
  std::vector<double> grid(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n)
    grid[n] = final_time * static_cast<double>(n) / static_cast<double>(steps);
  grid.back() = final_time;
  return grid;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> fine;
  fine.reserve(2 * grid.size());
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    fine.push_back(grid[n]);
    fine.push_back(grid[n] + 0.5 * (grid[n + 1] - grid[n]));
  }
  fine.push_back(grid.back());
  return fine;
}

void check_grid(const std::vector<double>& grid, double final_time) {
  if (grid.size() < 2) throw ConfigError("time grid needs at least two points");
  if (grid.front() != 0.0) throw ConfigError("time grid must start at 0");
  if (std::abs(grid.back() - final_time) > 1e-12 * std::max(1.0, final_time))
    throw ConfigError("time grid must end at the final time");
  for (std::size_t n = 0; n + 1 < grid.size(); ++n)
    if (!(grid[n + 1] > grid[n])) throw ConfigError("time grid must be strictly increasing");
}

namespace {

void apply_increments(const ReactionNetwork& net, std::span<const std::int64_t> x,
                      std::span<const std::int64_t> inc, std::span<std::int64_t> out) {
  std::copy(x.begin(), x.end(), out.begin());
  for (std::size_t j = 0; j < net.channels(); ++j) {
    if (inc[j] == 0) continue;
    const auto& nu = net.reactions[j].nu;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += nu[i] * inc[j];
  }
}

bool nonnegative(std::span<const std::int64_t> x) {
  return std::all_of(x.begin(), x.end(), [](std::int64_t v) { return v >= 0; });
}

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(b)); }

struct StepperOptions {
  bool land_on_stored = false;
  const LeapControl* leap = nullptr;
};

// Shared stepping loop of the bridge and coupled paths.
Trajectory run_bridged_steps(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                             const std::vector<double>& grid, ChannelHistory& hist, RngStream& rng,
                             const StepperOptions& opt) {
  const std::size_t d = net.dim();
  const std::size_t m = net.channels();
  Trajectory tr(d, m, grid);
  tr.start(grid.front(), x0);

  State x(x0.begin(), x0.end());
  State trial(d);
  std::vector<double> a(m), target(m);
  std::vector<std::int64_t> inc(m);
  const std::vector<std::int64_t> zeros(m, 0);

  double t = grid.front();
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double t_end = grid[n + 1];
    while (true) {
      const double remaining = t_end - t;
      const double a0 = propensities(net, x, a);
      if (a0 == 0.0) {
        tr.push(t_end, x, zeros, false, n);
        t = t_end;
        break;
      }

      double tau = remaining;
      bool reaches_end = true;
      if (opt.leap && opt.leap->mode == LeapControl::Mode::pre_leap) {
        const double leap = select_leap_size(net, x, *opt.leap);
        if (leap < tau) {
          tau = leap;
          reaches_end = false;
        }
      }
      std::ptrdiff_t landing = -1;
      double landing_lambda = 0.0;
      if (opt.land_on_stored) {
        for (std::size_t j = 0; j < m; ++j) {
          if (a[j] <= 0.0) continue;
          const auto next = hist.next_stored(j);
          if (!next) continue;
          const double cand = (next->lambda - hist.lambda(j)) / a[j];
          if (cand < tau) {
            tau = cand;
            landing = static_cast<std::ptrdiff_t>(j);
            landing_lambda = next->lambda;
            reaches_end = false;
          }
        }
      }

      bool halved = false;
      for (int depth = 0;; ++depth) {
        for (std::size_t j = 0; j < m; ++j) {
          if (a[j] <= 0.0) {
            target[j] = hist.lambda(j);
            inc[j] = 0;
            continue;
          }
          std::int64_t y;
          if (static_cast<std::ptrdiff_t>(j) == landing) {
            target[j] = landing_lambda;
            y = hist.sample_at(j, target[j], rng);
          } else if (hist.at_frontier(j)) {
            const double delta = a[j] * tau;
            target[j] = hist.lambda(j) + delta;
            y = hist.extend(j, delta, rng);
          } else {
            target[j] = hist.lambda(j) + a[j] * tau;
            y = hist.sample_at(j, target[j], rng);
          }
          inc[j] = y - hist.count(j);
        }
        apply_increments(net, x, inc, trial);
        if (nonnegative(trial)) break;
        if (depth + 1 > kMaxHalvingDepth) {
          std::ostringstream os;
          os << "bridge halving depth exceeded " << kMaxHalvingDepth << " at t=" << t << ", state=(";
          for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << x[i];
          os << "), base step " << n;
          throw NumericalError(os.str());
        }
        tau *= 0.5;
        landing = -1;
        reaches_end = false;
        halved = true;
        tr.count_halving();
      }

      for (std::size_t j = 0; j < m; ++j)
        if (a[j] > 0.0 && target[j] > hist.lambda(j)) hist.advance(j, target[j]);

      double t_new = reaches_end ? t_end : t + tau;
      if (t_new > t_end || close_to(t_new, t_end)) t_new = t_end;
      tr.push(t_new, trial, inc, halved, n);
      x.swap(trial);
      t = t_new;
      if (t == t_end) break;
    }
  }
  return tr;
}

}  // namespace

// SSA -------------------------------------------------------------------------

SsaSummary ssa_terminal(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                        double final_time, RngStream& rng) {
  SsaSummary out{State(x0.begin(), x0.end()), 0};
  std::vector<double> a(net.channels());
  double t = 0.0;
  while (true) {
    const double a0 = propensities(net, out.state, a);
    if (a0 <= 0.0) break;
    t += sample_exponential(a0, rng);
    if (t > final_time) break;
    const std::size_t j = sample_categorical(a, rng);
    const auto& nu = net.reactions[j].nu;
    for (std::size_t i = 0; i < out.state.size(); ++i) out.state[i] += nu[i];
    ++out.jumps;
  }
  return out;
}

Trajectory ssa_path(const ReactionNetwork& net, std::span<const std::int64_t> x0, double final_time,
                    RngStream& rng) {
  const std::size_t m = net.channels();
  Trajectory tr(net.dim(), m, {0.0, final_time});
  tr.start(0.0, x0);
  State x(x0.begin(), x0.end());
  std::vector<double> a(m);
  std::vector<std::int64_t> inc(m, 0);
  double t = 0.0;
  while (true) {
    const double a0 = propensities(net, x, a);
    if (a0 <= 0.0) break;
    const double next = t + sample_exponential(a0, rng);
    if (next > final_time) break;
    const std::size_t j = sample_categorical(a, rng);
    const auto& nu = net.reactions[j].nu;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += nu[i];
    std::fill(inc.begin(), inc.end(), 0);
    inc[j] = 1;
    tr.push(next, x, inc, false, 0);
    t = next;
  }
  if (t < final_time) {
    std::fill(inc.begin(), inc.end(), 0);
    tr.push(final_time, x, inc, false, 0);
  }
  return tr;
}

// Tau-leap ----------------------------------------------------------------------

double select_leap_size(const ReactionNetwork& net, std::span<const std::int64_t> state,
                        const LeapControl& control) {
  if (!(control.epsilon > 0.0 && control.epsilon < 1.0))
    throw ArgumentError("leap control epsilon must lie in (0,1)");
  const std::size_t m = net.channels();
  std::vector<double> a(m);
  const double a0 = propensities(net, state, a);
  if (a0 <= 0.0) throw ArgumentError("select_leap_size called in an absorbed state (a0 = 0)");

  const std::vector<double> x(state.begin(), state.end());
  double tau = control.tau_max;
  for (std::size_t j = 0; j < m; ++j) {
    const auto grad = propensity_gradient(net.reactions[j], std::span<const double>(x));
    double mu = 0.0, sigma2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) dot += grad[k] * net.reactions[i].nu[k];
      mu += a[i] * dot;
      sigma2 += a[i] * dot * dot;
    }
    if (mu != 0.0) tau = std::min(tau, control.epsilon * a0 / std::abs(mu));
    if (sigma2 != 0.0) tau = std::min(tau, control.epsilon * control.epsilon * a0 * a0 / sigma2);
  }
  return tau;
}

TauLeapStep tau_leap_step(const ReactionNetwork& net, std::span<const std::int64_t> state,
                          double tau, RngStream& rng) {
  if (!(tau > 0.0)) throw ArgumentError("tau-leap step size must be positive");
  const std::size_t m = net.channels();
  TauLeapStep out{State(state.size()), std::vector<std::int64_t>(m, 0)};
  for (std::size_t j = 0; j < m; ++j)
    out.increments[j] = sample_poisson(propensity(net.reactions[j], state) * tau, rng);
  apply_increments(net, state, out.increments, out.state);
  return out;
}

Trajectory tau_leap_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                         const std::vector<double>& base_grid, RngStream& rng,
                         const LeapControl& control) {
  Trajectory tr(net.dim(), net.channels(), base_grid);
  tr.start(base_grid.front(), x0);
  State x(x0.begin(), x0.end());
  std::vector<double> a(net.channels());
  double t = base_grid.front();
  for (std::size_t n = 0; n + 1 < base_grid.size(); ++n) {
    const double t_end = base_grid[n + 1];
    while (t < t_end) {
      double tau = t_end - t;
      bool reaches_end = true;
      if (control.mode == LeapControl::Mode::pre_leap && propensities(net, x, a) > 0.0) {
        const double leap = select_leap_size(net, x, control);
        if (leap < tau) {
          tau = leap;
          reaches_end = false;
        }
      }
      auto step = tau_leap_step(net, x, tau, rng);
      double t_new = reaches_end ? t_end : t + tau;
      if (close_to(t_new, t_end)) t_new = t_end;
      tr.push(t_new, step.state, step.increments, false, n);
      x = std::move(step.state);
      t = t_new;
    }
  }
  return tr;
}

BridgePath bridge_tau_leap_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                                const std::vector<double>& base_grid, RngStream& rng,
                                const LeapControl& control) {
  BridgePath out;
  out.history = ChannelHistory(net.channels());
  StepperOptions opt{true, &control};
  out.trajectory = run_bridged_steps(net, x0, base_grid, out.history, rng, opt);
  return out;
}

Trajectory coupled_refined_path(const ReactionNetwork& net, const BridgePath& coarse, RngStream& rng) {
  ChannelHistory hist = coarse.history.rewound();
  const auto fine_grid = refine_grid(coarse.trajectory.base_grid());
  StepperOptions opt{false, nullptr};
  return run_bridged_steps(net, coarse.trajectory.state(0), fine_grid, hist, rng, opt);
}

}  // namespace tauleap
