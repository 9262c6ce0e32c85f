#include "tauleap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_real(const std::string& token) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + token + "' as a number");
  }
}

LeapControl leap_for(const ExperimentConfig& config) {
  LeapControl leap;
  leap.epsilon = config.leap_epsilon;
  leap.mode = config.pre_leap ? LeapControl::Mode::pre_leap : LeapControl::Mode::fixed_grid;
  return leap;
}

EstimatorOptions estimator_options(const ExperimentConfig& config) {
  EstimatorOptions eo;
  eo.seed = config.seed;
  eo.leap = leap_for(config);
  eo.weight_time = config.weight_time;
  eo.fixed_paths = config.fixed_paths;
  return eo;
}

bool requested(const ExperimentConfig& config, EstimatorKind kind) {
  return std::find(config.estimators.begin(), config.estimators.end(), kind) !=
         config.estimators.end();
}

}  // namespace

std::vector<double> parse_tau_levels(const std::string& text) {
  std::vector<double> levels;
  for (const auto& token : split(text, ',')) {
    const auto slash = token.find('/');
    if (slash == std::string::npos) {
      levels.push_back(parse_real(token));
    } else {
      const double den = parse_real(token.substr(slash + 1));
      if (den == 0.0) throw ConfigError("tau level '" + token + "' divides by zero");
      levels.push_back(parse_real(token.substr(0, slash)) / den);
    }
  }
  if (levels.empty()) throw ConfigError("no tau levels given");
  return levels;
}

std::size_t steps_for(double tau, double final_time) {
  if (!(tau > 0.0)) throw ConfigError("tau levels must be positive");
  const double ratio = final_time / tau;
  const auto steps = std::llround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "tau level " << tau << " does not divide the final time " << final_time;
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(steps);
}

void check_tau_levels(const std::vector<double>& levels, double final_time) {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    steps_for(levels[k], final_time);
    if (k > 0 && !(levels[k] < levels[k - 1]))
      throw ConfigError("tau levels must be strictly decreasing");
  }
}

std::vector<EstimatorKind> parse_estimators(const std::string& text) {
  std::vector<EstimatorKind> out;
  for (const auto& token : split(text, ',')) out.push_back(estimator_from_string(token));
  if (out.empty()) throw ConfigError("no estimators selected");
  return out;
}

// Analytic decay references -----------------------------------------------------------

bool is_decay(const ReactionNetwork& net) {
  return net.analytic == "decay" && net.dim() == 1 && net.channels() == 1 &&
         net.reactions[0].nu == std::vector<int>{-1} && net.reactions[0].order() == 1;
}

std::optional<double> analytic_mean(const ReactionNetwork& net, const Observable& g) {
  if (!is_decay(net)) return std::nullopt;
  const auto x0 = net.initial_state[0];
  const double p = std::exp(-net.reactions[0].rate * net.final_time);
  if (x0 == 0 || p >= 1.0) return g.value(std::span<const std::int64_t>(net.initial_state));
  const double n = static_cast<double>(x0);
  const double mean = n * p;
  const double sd = std::sqrt(n * p * (1.0 - p));
  const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean - 40.0 * sd - 1.0)));
  const auto hi = std::min<std::int64_t>(x0, static_cast<std::int64_t>(std::ceil(mean + 40.0 * sd + 1.0)));
  const double log_p = std::log(p), log_q = std::log1p(-p);
  double total = 0.0;
  std::vector<double> x(1);
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double kk = static_cast<double>(k);
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) +
                           kk * log_p + (n - kk) * log_q;
    x[0] = kk;
    total += std::exp(log_pmf) * g.value(std::span<const double>(x));
  }
  return total;
}

std::optional<double> analytic_tau_leap_error(const ReactionNetwork& net, const Observable& g,
                                              const std::vector<double>& grid) {
  if (!is_decay(net)) return std::nullopt;
  double linear = 0.0;
  for (const auto& term : g.terms) {
    if (term.exponents[0] > 1) return std::nullopt;
    if (term.exponents[0] == 1) linear += term.coeff;
  }
  const double c = net.reactions[0].rate;
  double product = 1.0;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) product *= 1.0 - c * (grid[n + 1] - grid[n]);
  const double x0 = static_cast<double>(net.initial_state[0]);
  return linear * x0 * (std::exp(-c * net.final_time) - product);
}

// Convergence study ---------------------------------------------------------------------

ValueFunction solve_for_levels(const Model& model, const std::vector<double>& tau_levels,
                               const KbeOptions& options) {
  const auto& net = model.network;
  check_tau_levels(tau_levels, net.final_time);
  const double finest = *std::min_element(tau_levels.begin(), tau_levels.end());
  return solve_backward(net, model.observable, uniform_grid(net.final_time, steps_for(finest, net.final_time)),
                        options);
}

ConvergenceStudy run_convergence_study(const Model& model, const ExperimentConfig& config,
                                       const ValueFunction* vf) {
  const auto& net = model.network;
  const auto& g = model.observable;
  check_tau_levels(config.tau_levels, net.final_time);

  ConvergenceStudy study;
  study.model = net.name;
  study.seed = config.seed;

  std::optional<ValueFunction> local;
  if (requested(config, EstimatorKind::rhs) && !vf) {
    local = solve_for_levels(model, config.tau_levels, config.kbe);
    vf = &*local;
  }
  study.grid_mode = vf ? to_string(vf->lattice.mode()) : "none";

  const EstimatorOptions eo = estimator_options(config);
  for (double tau : config.tau_levels) {
    const auto grid = uniform_grid(net.final_time, steps_for(tau, net.final_time));
    const auto reference = analytic_tau_leap_error(net, g, grid);
    const ErrorEstimate* lhs = nullptr;
    const ErrorEstimate* rhs = nullptr;
    const ErrorEstimate* dual = nullptr;
    std::size_t first = study.estimates.size();
    for (EstimatorKind kind : config.estimators) {
      switch (kind) {
        case EstimatorKind::lhs_approx:
          study.estimates.push_back(lhs_approx_estimate(net, g, grid, config.stop, eo));
          break;
        case EstimatorKind::rhs:
          study.estimates.push_back(rhs_estimate(net, grid, *vf, config.stop, eo));
          break;
        case EstimatorKind::rhs_dual:
          study.estimates.push_back(rhs_dual_estimate(net, g, grid, config.stop, eo));
          break;
      }
      const auto& e = study.estimates.back();
      study.rows.push_back({tau, kind, e.value, e.standard_error, e.n_samples, e.converged, reference});
    }
    for (std::size_t k = first; k < study.estimates.size(); ++k) {
      const auto& e = study.estimates[k];
      if (e.kind == EstimatorKind::lhs_approx) lhs = &e;
      if (e.kind == EstimatorKind::rhs) rhs = &e;
      if (e.kind == EstimatorKind::rhs_dual) dual = &e;
    }
    if (lhs && dual)
      study.efficiency.push_back(
          {tau, "lhs_approx/rhs_dual", efficiency_index(lhs->samples, dual->samples, config.bootstrap, config.seed)});
    if (lhs && rhs)
      study.efficiency.push_back(
          {tau, "lhs_approx/rhs", efficiency_index(lhs->samples, rhs->samples, config.bootstrap, config.seed)});
  }

  for (EstimatorKind kind : config.estimators) {
    const ConvergenceRow* prev = nullptr;
    for (const auto& row : study.rows) {
      if (row.estimator != kind) continue;
      if (prev) {
        ConvergenceOrder o{kind, prev->tau_max, row.tau_max, std::numeric_limits<double>::quiet_NaN()};
        if (prev->value != 0.0 && row.value != 0.0 && (prev->value > 0) == (row.value > 0))
          o.order = std::log(prev->value / row.value) / std::log(prev->tau_max / row.tau_max);
        study.orders.push_back(o);
      }
      prev = &row;
    }
  }
  return study;
}

// Density and work ------------------------------------------------------------------------

ErrorEstimate run_density(const Model& model, const ExperimentConfig& config, const ValueFunction* vf) {
  const auto& net = model.network;
  check_tau_levels(config.tau_levels, net.final_time);
  const auto grid = uniform_grid(net.final_time, steps_for(config.tau_levels.back(), net.final_time));
  DensitySource source;
  if (vf) source = {DensitySource::Kind::true_dual, vf};
  return error_density(net, model.observable, grid, config.stop, source, estimator_options(config));
}

std::vector<WorkReport> run_work_table(const Model& model, const ExperimentConfig& config,
                                       const ValueFunction* vf) {
  const auto& net = model.network;
  check_tau_levels(config.tau_levels, net.final_time);
  const auto grid = uniform_grid(net.final_time, steps_for(config.tau_levels.back(), net.final_time));
  std::vector<WorkReport> reports;
  for (bool pre_leap : {false, true}) {
    ExperimentConfig c = config;
    c.pre_leap = pre_leap;
    const EstimatorOptions eo = estimator_options(c);
    const std::string suffix = pre_leap ? "+leap_check" : "";
    reports.push_back(work_report(
        error_density(net, model.observable, grid, config.stop, {DensitySource::Kind::discrete_dual, nullptr}, eo),
        "discrete_dual" + suffix));
    if (vf)
      reports.push_back(work_report(
          error_density(net, model.observable, grid, config.stop, {DensitySource::Kind::true_dual, vf}, eo),
          "true_dual" + suffix));
  }
  return reports;
}

// Simulation -----------------------------------------------------------------------------------

Method method_from_string(const std::string& text) {
  if (text == "ssa") return Method::ssa;
  if (text == "tauleap") return Method::tauleap;
  if (text == "bridge") return Method::bridge;
  throw ConfigError("unknown method '" + text + "' (expected ssa, tauleap or bridge)");
}

std::vector<SimulationRow> run_simulation(const ReactionNetwork& net, Method method, double tau,
                                          const LeapControl& leap, std::size_t paths,
                                          std::uint64_t seed) {
  const double T = net.final_time;
  std::vector<double> grid{0.0, T};
  if (method != Method::ssa) {
    if (tau > 0.0)
      grid = uniform_grid(T, static_cast<std::size_t>(std::max(1.0, std::ceil(T / tau - 1e-9))));
    else if (leap.mode != LeapControl::Mode::pre_leap)
      throw ConfigError("tau-leap simulation needs --tau or --eps");
  }
  std::vector<SimulationRow> rows;
  rows.reserve(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    RngStream rng(seed, i);
    SimulationRow row;
    row.path = i;
    row.t_final = T;
    switch (method) {
      case Method::ssa: {
        auto s = ssa_terminal(net, net.initial_state, T, rng);
        row.state = std::move(s.state);
        row.steps = s.jumps;
        break;
      }
      case Method::tauleap: {
        auto tr = tau_leap_path(net, net.initial_state, grid, rng, leap);
        auto x = tr.terminal_state();
        row.state.assign(x.begin(), x.end());
        row.steps = tr.steps();
        break;
      }
      case Method::bridge: {
        auto bp = bridge_tau_leap_path(net, net.initial_state, grid, rng, leap);
        auto x = bp.trajectory.terminal_state();
        row.state.assign(x.begin(), x.end());
        row.steps = bp.trajectory.steps();
        row.halvings = bp.trajectory.halvings();
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Output ------------------------------------------------------------------------------------------

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "tau_max,estimator,value,se,n_samples,converged,reference\n";
  for (const auto& r : study.rows)
    out << num(r.tau_max) << ',' << to_string(r.estimator) << ',' << num(r.value) << ','
        << num(r.standard_error) << ',' << r.n_samples << ',' << (r.converged ? 1 : 0) << ','
        << (r.reference ? num(*r.reference) : "") << '\n';
}

void write_efficiency_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "tau_max,ratio,index,ci_low,ci_high,unstable\n";
  for (const auto& e : study.efficiency)
    out << num(e.tau_max) << ',' << e.ratio << ',' << num(e.index.index) << ',' << num(e.index.ci_low)
        << ',' << num(e.index.ci_high) << ',' << (e.index.unstable ? 1 : 0) << '\n';
}

void write_density_csv(std::ostream& out, const ErrorEstimate& density) {
  out << "n,t_n,tau_n,j,rho,rho_signed\n";
  for (std::size_t n = 0; n < density.intervals(); ++n) {
    const double t = density.base_grid[n];
    const double tau = density.base_grid[n + 1] - t;
    for (std::size_t j = 0; j < density.channels; ++j)
      out << n << ',' << num(t) << ',' << num(tau) << ',' << j << ','
          << num(density.density[n * density.channels + j]) << ','
          << num(density.signed_density[n * density.channels + j]) << '\n';
  }
}

void write_work_csv(std::ostream& out, const std::vector<WorkReport>& reports) {
  out << "variant,current,optimal,uniform,optimal_raw,uniform_raw,error_scale,degenerate\n";
  for (const auto& w : reports)
    out << w.variant << ',' << num(w.current_work) << ',' << num(w.optimal_work) << ','
        << num(w.uniform_work) << ',' << num(w.optimal_raw) << ',' << num(w.uniform_raw) << ','
        << num(w.error_scale) << ',' << (w.degenerate ? 1 : 0) << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<WorkComparisonRow>& rows) {
  out << "gamma,tau,work_tl,work_ssa,ratio,relative_error,relative_error_se,lhs_samples,ssa_paths\n";
  for (const auto& r : rows)
    out << num(r.gamma) << ',' << num(r.tau) << ',' << num(r.work_tl) << ',' << num(r.work_ssa) << ','
        << num(r.ratio) << ',' << num(r.relative_error) << ',' << num(r.relative_error_se) << ','
        << r.lhs_samples << ',' << r.ssa_paths << '\n';
}

void write_simulation_csv(std::ostream& out, const ReactionNetwork& net,
                          const std::vector<SimulationRow>& rows) {
  out << "path_index,t_final";
  for (const auto& s : net.species) out << ',' << s;
  out << ",n_steps,n_halvings\n";
  for (const auto& r : rows) {
    out << r.path << ',' << num(r.t_final);
    for (auto x : r.state) out << ',' << x;
    out << ',' << r.steps << ',' << r.halvings << '\n';
  }
}

void emit_report(std::ostream& out, const ConvergenceStudy& study) {
  out << "convergence study: " << study.model << " (seed " << study.seed << ", KBE grid "
      << study.grid_mode << ")\n";
  if (study.rows.empty()) {
    out << "no rows\n";
    return;
  }
  for (const auto& r : study.rows) {
    out << "  tau=" << num(r.tau_max) << "  " << std::setw(10) << std::left << to_string(r.estimator)
        << std::right << " = " << num(r.value) << " +/- " << num(1.96 * r.standard_error) << "  (n="
        << r.n_samples << (r.converged ? "" : ", not converged") << ")";
    if (r.reference) out << "  analytic " << num(*r.reference);
    out << '\n';
  }
  for (const auto& o : study.orders)
    out << "  order " << to_string(o.estimator) << " " << num(o.tau_coarse) << " -> " << num(o.tau_fine)
        << ": " << num(o.order) << '\n';
  for (const auto& e : study.efficiency) {
    out << "  efficiency " << e.ratio << " at tau=" << num(e.tau_max) << ": " << num(e.index.index);
    if (e.index.unstable)
      out << " (unstable: rhs interval contains 0)";
    else
      out << " [" << num(e.index.ci_low) << ", " << num(e.index.ci_high) << "]";
    out << '\n';
  }
}

void emit_report(std::ostream& out, const std::vector<WorkReport>& reports, std::uint64_t seed) {
  out << "work table (seed " << seed << ")\n";
  if (reports.empty()) {
    out << "no rows\n";
    return;
  }
  for (const auto& w : reports) {
    out << "  " << w.variant << ": current " << num(w.current_work);
    if (w.degenerate) {
      out << ", zero estimated error (degenerate)\n";
      continue;
    }
    out << ", optimal " << num(w.optimal_work) << ", uniform " << num(w.uniform_work)
        << ", uniform/optimal " << num(w.uniform_work / w.optimal_work) << ", uniform/current "
        << num(w.uniform_work / w.current_work) << '\n';
  }
}

void emit_report(std::ostream& out, const ErrorEstimate& density) {
  out << "error density (" << to_string(density.kind) << ", seed " << density.seed << ", "
      << density.n_samples << " paths)\n";
  if (density.intervals() == 0) {
    out << "no rows\n";
    return;
  }
  const auto rho = density.interval_density();
  const auto peak = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  out << "  estimate " << num(density.value) << " +/- " << num(1.96 * density.standard_error) << '\n'
      << "  max density " << num(rho[peak]) << " at t=" << num(density.base_grid[peak]) << '\n'
      << "  unquantified: " << ErrorEstimate::unquantified_remainder << '\n';
}

void emit_report(std::ostream& out, const std::vector<WorkComparisonRow>& rows, std::uint64_t seed) {
  out << "work comparison (seed " << seed << ")\n";
  if (rows.empty()) {
    out << "no rows\n";
    return;
  }
  for (const auto& r : rows)
    out << "  gamma=" << num(r.gamma) << " tau=" << num(r.tau) << "  Work_TL " << num(r.work_tl)
        << "  Work_SSA " << num(r.work_ssa) << "  ratio " << num(r.ratio) << "  rel. error "
        << num(r.relative_error) << " +/- " << num(1.96 * r.relative_error_se) << '\n';
}

}  // namespace tauleap
