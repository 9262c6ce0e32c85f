// tauleap: command-line front end for simulation, KBE solves, error
// estimation and work experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tauleap/error.hpp"
#include "tauleap/experiments.hpp"

namespace fs = std::filesystem;
using namespace tauleap;

namespace {

struct Common {
  std::string model;
  std::string tau_levels = "1/4,1/8,1/16,1/32";
  std::string estimators = "lhs_approx,rhs,rhs_dual";
  std::string kbe;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 1;
  std::string out = ".";
  double eps = 0.05;
  bool pre_leap = false;
  double se_target = 0.1;
  std::size_t min_samples = 100;
  std::size_t max_samples = 1'000'000;
  std::size_t paths = 0;
  std::string weight_time = "at-n-plus-1";
  std::string grid = "full";
  std::size_t log_points = kDefaultLogPoints;
  double tol = -1.0;
};

void add_model(CLI::App* app, Common& c) {
  app->add_option("--model", c.model, "Model file (JSON)")->required()->check(CLI::ExistingFile);
}

void add_run_options(CLI::App* app, Common& c) {
  app->add_option("--tau-levels", c.tau_levels, "Comma-separated maximum step sizes, e.g. 1/4,1/8");
  app->add_option("--kbe", c.kbe, "Value-function archive from solve-kbe");
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--eps", c.eps, "Leap-condition epsilon")->capture_default_str();
  app->add_flag("--pre-leap", c.pre_leap, "Subdivide base steps with the leap-size condition");
  app->add_option("--se-target", c.se_target, "Relative half-width target of the 95% interval")
      ->capture_default_str();
  app->add_option("--min-samples", c.min_samples, "Minimum Monte Carlo samples")->capture_default_str();
  app->add_option("--max-samples", c.max_samples, "Maximum Monte Carlo samples")->capture_default_str();
  app->add_option("--weight-time", c.weight_time, "Dual weight time: at-n or at-n-plus-1")
      ->check(CLI::IsMember({"at-n", "at-n-plus-1"}))
      ->capture_default_str();
  app->add_option("--grid", c.grid, "KBE lattice when solved on the fly: full or log")
      ->check(CLI::IsMember({"full", "log"}))
      ->capture_default_str();
}

ExperimentConfig make_config(const Common& c, const Model& model) {
  ExperimentConfig cfg;
  cfg.model_path = c.model;
  cfg.tau_levels = parse_tau_levels(c.tau_levels);
  check_tau_levels(cfg.tau_levels, model.network.final_time);
  cfg.estimators = parse_estimators(c.estimators);
  cfg.stop.rel_target = c.se_target;
  cfg.stop.min_samples = c.min_samples;
  cfg.stop.max_samples = c.max_samples;
  cfg.stop.workers = c.workers;
  cfg.seed = c.seed;
  cfg.out_dir = c.out;
  cfg.kbe_archive = c.kbe;
  cfg.leap_epsilon = c.eps;
  cfg.pre_leap = c.pre_leap;
  cfg.weight_time = c.weight_time == "at-n" ? WeightTime::at_n : WeightTime::at_n_plus_1;
  cfg.fixed_paths = c.paths;
  cfg.kbe.mode = grid_mode_from_string(c.grid);
  cfg.kbe.log_points = c.log_points;
  cfg.kbe.tol = c.tol;
  return cfg;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
  return out;
}

std::optional<ValueFunction> maybe_archive(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_archive(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tau-leap simulation and a posteriori weak-error estimation for reaction networks"};
  app.require_subcommand(1);
  Common c;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate paths and write terminal states");
  std::string method = "bridge";
  double tau = 0.0;
  std::size_t sim_paths = 10;
  std::optional<double> sim_eps;
  add_model(sim, c);
  sim->add_option("--method", method, "ssa, tauleap or bridge")
      ->check(CLI::IsMember({"ssa", "tauleap", "bridge"}))
      ->capture_default_str();
  sim->add_option("--tau", tau, "Uniform step size");
  sim->add_option("--eps", sim_eps, "Select steps by the leap condition with this epsilon");
  sim->add_option("--paths", sim_paths, "Number of paths")->capture_default_str();
  sim->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sim->add_option("--out", c.out, "Output directory (CSV to stdout when omitted)");

  // solve-kbe
  auto* kbe = app.add_subcommand("solve-kbe", "Solve the backward Kolmogorov equation");
  std::size_t snapshots = 32;
  std::string archive = "value_function.kbe";
  add_model(kbe, c);
  kbe->add_option("--grid", c.grid, "full or log")->check(CLI::IsMember({"full", "log"}))->capture_default_str();
  kbe->add_option("--log-points", c.log_points, "Log-spaced nodes per dimension")->capture_default_str();
  kbe->add_option("--snapshots", snapshots, "Number of uniform snapshot intervals on [0,T]")
      ->capture_default_str();
  kbe->add_option("--tol", c.tol, "Time-integration tolerance per unit time");
  kbe->add_option("--out", archive, "Archive file to write")->capture_default_str();

  // converge
  auto* conv = app.add_subcommand("converge", "Estimator convergence study over tau levels");
  add_model(conv, c);
  add_run_options(conv, c);
  conv->add_option("--estimators", c.estimators, "Comma list of lhs_approx, rhs, rhs_dual")
      ->capture_default_str();

  // density
  auto* dens = app.add_subcommand("density", "Error density on the finest tau level");
  add_model(dens, c);
  add_run_options(dens, c);
  dens->add_option("--paths", c.paths, "Fixed number of paths (default: stopping rule)");

  // work
  auto* work = app.add_subcommand("work", "Current, optimal and uniform work estimates");
  add_model(work, c);
  add_run_options(work, c);
  work->add_option("--paths", c.paths, "Fixed number of paths (default: stopping rule)");

  // compare-work
  auto* cmp = app.add_subcommand("compare-work", "Tau-leap versus SSA work over a scaled family");
  WorkComparisonOptions wc;
  std::string gammas = "1e2,1e4,1e6";
  add_model(cmp, c);
  add_run_options(cmp, c);
  cmp->add_option("--gammas", gammas, "Comma list of scale factors")->capture_default_str();
  cmp->add_option("--step-h", wc.h, "Base step h (tau = h gamma^-delta)")->capture_default_str();
  cmp->add_option("--ssa-paths", wc.ssa_paths, "SSA paths per gamma")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const Model model = load_model(c.model);
    const auto& net = model.network;

    if (*sim) {
      LeapControl leap;
      if (sim_eps) {
        leap.epsilon = *sim_eps;
        leap.mode = LeapControl::Mode::pre_leap;
      }
      const auto rows = run_simulation(net, method_from_string(method), tau, leap, sim_paths, c.seed);
      if (sim->count("--out")) {
        auto out = open_output(c.out, "simulate.csv");
        write_simulation_csv(out, net, rows);
      } else {
        write_simulation_csv(std::cout, net, rows);
      }
    } else if (*kbe) {
      KbeOptions opt;
      opt.mode = grid_mode_from_string(c.grid);
      opt.log_points = c.log_points;
      opt.tol = c.tol;
      const auto vf = solve_backward(net, model.observable, uniform_grid(net.final_time, snapshots), opt);
      save_archive(vf, archive);
      std::cout << "solved KBE on " << vf.lattice.size() << " nodes (" << to_string(vf.lattice.mode())
                << " grid), " << vf.times.size() << " snapshots, " << vf.inner_steps
                << " inner steps; wrote " << archive << '\n';
      if (net.dim() == 1) {
        const State x0 = net.initial_state;
        std::cout << "u(X0, 0) = " << query_value(vf, x0, 0.0) << '\n';
      }
    } else if (*conv) {
      const auto cfg = make_config(c, model);
      const auto vf = maybe_archive(cfg.kbe_archive);
      const auto study = run_convergence_study(model, cfg, vf ? &*vf : nullptr);
      {
        auto out = open_output(cfg.out_dir, "convergence.csv");
        write_convergence_csv(out, study);
      }
      {
        auto out = open_output(cfg.out_dir, "efficiency.csv");
        write_efficiency_csv(out, study);
      }
      emit_report(std::cout, study);
    } else if (*dens) {
      const auto cfg = make_config(c, model);
      const auto vf = maybe_archive(cfg.kbe_archive);
      const auto density = run_density(model, cfg, vf ? &*vf : nullptr);
      auto out = open_output(cfg.out_dir, "density.csv");
      write_density_csv(out, density);
      emit_report(std::cout, density);
    } else if (*work) {
      const auto cfg = make_config(c, model);
      const auto vf = maybe_archive(cfg.kbe_archive);
      const auto reports = run_work_table(model, cfg, vf ? &*vf : nullptr);
      auto out = open_output(cfg.out_dir, "work.csv");
      write_work_csv(out, reports);
      emit_report(std::cout, reports, cfg.seed);
    } else if (*cmp) {
      const auto cfg = make_config(c, model);
      wc.gammas = parse_tau_levels(gammas);
      wc.stop = cfg.stop;
      wc.seed = cfg.seed;
      const auto rows = work_comparison_experiment(net, model.observable, wc);
      auto out = open_output(cfg.out_dir, "compare_work.csv");
      write_comparison_csv(out, rows);
      emit_report(std::cout, rows, cfg.seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
