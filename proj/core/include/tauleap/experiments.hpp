#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tauleap/estimate.hpp"
#include "tauleap/kbe.hpp"
#include "tauleap/model_io.hpp"

namespace tauleap {

struct ExperimentConfig {
  std::string model_path;
  std::string command;
  /// Maximum step sizes, strictly decreasing; each must divide T.
  std::vector<double> tau_levels;
  std::vector<EstimatorKind> estimators{EstimatorKind::lhs_approx, EstimatorKind::rhs,
                                        EstimatorKind::rhs_dual};
  StopRule stop{};
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = ".";
  std::string kbe_archive;
  double leap_epsilon = 0.05;
  bool pre_leap = false;
  WeightTime weight_time = WeightTime::at_n_plus_1;
  /// Fixed path count for density and work runs (0 = use the stopping rule).
  std::size_t fixed_paths = 0;
  std::size_t bootstrap = 200;
  KbeOptions kbe{};
};

/// Parses "0.25,1/8,0.0625" into step sizes.
std::vector<double> parse_tau_levels(const std::string& text);
/// Throws ConfigError unless levels decrease strictly and divide T.
void check_tau_levels(const std::vector<double>& levels, double final_time);
std::vector<EstimatorKind> parse_estimators(const std::string& text);
std::size_t steps_for(double tau, double final_time);

// Analytic references for the pure-death model tagged analytic = "decay".

bool is_decay(const ReactionNetwork& net);
/// E[g(X_T)] with X_T ~ Binomial(X0, exp(-cT)).
std::optional<double> analytic_mean(const ReactionNetwork& net, const Observable& g);
/// E[g(X_T)] - E[g(Xbar_T)] for plain tau-leap on `grid`, linear g only.
std::optional<double> analytic_tau_leap_error(const ReactionNetwork& net, const Observable& g,
                                              const std::vector<double>& grid);

// Convergence study ------------------------------------------------------------------------

struct ConvergenceRow {
  double tau_max = 0.0;
  EstimatorKind estimator = EstimatorKind::lhs_approx;
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  bool converged = false;
  std::optional<double> reference;
};

struct ConvergenceOrder {
  EstimatorKind estimator;
  double tau_coarse = 0.0;
  double tau_fine = 0.0;
  double order = 0.0;
};

struct EfficiencyRow {
  double tau_max = 0.0;
  std::string ratio;  ///< e.g. "lhs_approx/rhs_dual"
  EfficiencyIndex index;
};

struct ConvergenceStudy {
  std::string model;
  std::uint64_t seed = 0;
  std::string grid_mode;
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceOrder> orders;
  std::vector<EfficiencyRow> efficiency;
  std::vector<ErrorEstimate> estimates;
};

/// KBE snapshots on the finest level grid (covers every coarser level).
ValueFunction solve_for_levels(const Model& model, const std::vector<double>& tau_levels,
                               const KbeOptions& options);

ConvergenceStudy run_convergence_study(const Model& model, const ExperimentConfig& config,
                                       const ValueFunction* vf = nullptr);

// Density and work ---------------------------------------------------------------------------

ErrorEstimate run_density(const Model& model, const ExperimentConfig& config,
                          const ValueFunction* vf = nullptr);

/// Work reports at the finest tau level for the discrete-dual density (and
/// the true-dual density when vf is given), without and with pre-leap selection.
std::vector<WorkReport> run_work_table(const Model& model, const ExperimentConfig& config,
                                       const ValueFunction* vf = nullptr);

// Simulation -----------------------------------------------------------------------------------

struct SimulationRow {
  std::size_t path = 0;
  double t_final = 0.0;
  State state;
  std::size_t steps = 0;
  std::size_t halvings = 0;
};

enum class Method { ssa, tauleap, bridge };
Method method_from_string(const std::string& text);

std::vector<SimulationRow> run_simulation(const ReactionNetwork& net, Method method, double tau,
                                          const LeapControl& leap, std::size_t paths,
                                          std::uint64_t seed);

// CSV and report output ---------------------------------------------------------------------------

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study);
void write_efficiency_csv(std::ostream& out, const ConvergenceStudy& study);
void write_density_csv(std::ostream& out, const ErrorEstimate& density);
void write_work_csv(std::ostream& out, const std::vector<WorkReport>& reports);
void write_comparison_csv(std::ostream& out, const std::vector<WorkComparisonRow>& rows);
void write_simulation_csv(std::ostream& out, const ReactionNetwork& net,
                          const std::vector<SimulationRow>& rows);

void emit_report(std::ostream& out, const ConvergenceStudy& study);
void emit_report(std::ostream& out, const std::vector<WorkReport>& reports, std::uint64_t seed);
void emit_report(std::ostream& out, const ErrorEstimate& density);
void emit_report(std::ostream& out, const std::vector<WorkComparisonRow>& rows, std::uint64_t seed);

}  // namespace tauleap
