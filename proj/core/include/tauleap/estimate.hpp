#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tauleap/dual.hpp"
#include "tauleap/kbe.hpp"
#include "tauleap/model.hpp"
#include "tauleap/montecarlo.hpp"
#include "tauleap/rng.hpp"
#include "tauleap/simulate.hpp"

namespace tauleap {

enum class EstimatorKind { lhs_approx, rhs, rhs_dual };
std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string& text);

/// Which dual weight pairs with the residual of step n.
enum class WeightTime { at_n, at_n_plus_1 };
std::string to_string(WeightTime w);

struct EstimatorOptions {
  std::uint64_t seed = kDefaultSeed;
  LeapControl leap{};
  DualOptions dual{};
  WeightTime weight_time = WeightTime::at_n_plus_1;
  /// When nonzero, run exactly this many paths instead of the stopping rule.
  std::size_t fixed_paths = 0;
  /// Pilot floor for lhs_approx: coupled pairs coincide on most paths, so a
  /// small pilot can consist of zeros only.
  std::size_t lhs_min_samples = 10'000;
};

struct ErrorEstimate {
  EstimatorKind kind = EstimatorKind::lhs_approx;
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double tau_max = 0.0;
  std::vector<double> base_grid;
  std::size_t channels = 0;
  /// Mean binned contribution divided by tau_n^2, per (interval n, channel j), flat n*M+j.
  std::vector<double> signed_density;
  /// Absolute values of signed_density.
  std::vector<double> density;
  /// Mean number of realized coarse steps per path.
  double mean_steps = 0.0;
  /// Mean of g over the coarse terminal states (lhs_approx only).
  double coarse_observable_mean = 0.0;
  std::vector<double> samples;
  /// Remainder terms that are part of the error expansion but never estimated.
  static constexpr const char* unquantified_remainder =
      "diffusion-type remainder and higher-order terms not estimated";

  std::size_t intervals() const { return base_grid.empty() ? 0 : base_grid.size() - 1; }
  double density_at(std::size_t n, std::size_t j) const { return density[n * channels + j]; }
  /// rho_n = sum_j rho_{j,n}.
  std::vector<double> interval_density() const;
};

// Per-path primitives ------------------------------------------------------------

/// 2 (g(X_fine_T) - g(X_coarse_T)) for one coupled coarse/fine pair.
struct LhsSample {
  double value = 0.0;
  double coarse_observable = 0.0;
  std::size_t coarse_steps = 0;
};
LhsSample lhs_approx_sample(const ReactionNetwork& net, const Observable& g,
                            const std::vector<double>& base_grid, RngStream& rng,
                            const LeapControl& leap = {});

/// Adds (tau_k/2)(a_j(X_{k+1}) - a_j(X_k)) D_j u(X_{k+1}, t*) for every realized
/// step k into bins[n*M + j] (n = containing base interval, t* its right end).
/// Returns the total.
double rhs_contributions(const ReactionNetwork& net, const Trajectory& path, const ValueFunction& vf,
                         std::span<double> bins);

/// Same with the value-function difference replaced by phi . nu_j.
double rhs_dual_contributions(const ReactionNetwork& net, const Trajectory& path,
                              const DualWeights& dual, WeightTime weight_time, std::span<double> bins);

// Estimators ------------------------------------------------------------------------

ErrorEstimate lhs_approx_estimate(const ReactionNetwork& net, const Observable& g,
                                  const std::vector<double>& base_grid, const StopRule& stop,
                                  const EstimatorOptions& options = {});

/// Requires a snapshot at every base-grid time.
ErrorEstimate rhs_estimate(const ReactionNetwork& net, const std::vector<double>& base_grid,
                           const ValueFunction& vf, const StopRule& stop,
                           const EstimatorOptions& options = {});

ErrorEstimate rhs_dual_estimate(const ReactionNetwork& net, const Observable& g,
                                const std::vector<double>& base_grid, const StopRule& stop,
                                const EstimatorOptions& options = {});

struct DensitySource {
  enum class Kind { discrete_dual, true_dual };
  Kind kind = Kind::discrete_dual;
  const ValueFunction* vf = nullptr;
};

/// Error density rho_{j,n} from the chosen weight source.
ErrorEstimate error_density(const ReactionNetwork& net, const Observable& g,
                            const std::vector<double>& base_grid, const StopRule& stop,
                            const DensitySource& source, const EstimatorOptions& options = {});

// Work models ------------------------------------------------------------------------

struct WorkReport {
  std::string variant;
  double current_work = 0.0;
  /// (sum_n sqrt(rho_n) tau_n)^2 and T sum_n rho_n tau_n.
  double optimal_raw = 0.0;
  double uniform_raw = 0.0;
  /// Step counts to reach the error level `error_scale`: raw values divided by it.
  double error_scale = 0.0;
  double optimal_work = 0.0;
  double uniform_work = 0.0;
  bool degenerate = false;
};

WorkReport work_estimates(const std::vector<double>& base_grid, std::span<const double> rho,
                          double current_work, double error_scale = 0.0);

/// Work report from a density estimate; the error level is |estimate value|.
WorkReport work_report(const ErrorEstimate& density, std::string variant);

// Work comparison ---------------------------------------------------------------------

struct WorkComparisonRow {
  double gamma = 0.0;
  double tau = 0.0;
  double work_tl = 0.0;
  double work_ssa = 0.0;
  double ratio = 0.0;  ///< work_ssa / work_tl
  double relative_error = 0.0;
  double relative_error_se = 0.0;
  std::size_t lhs_samples = 0;
  std::size_t ssa_paths = 0;
};

struct WorkComparisonOptions {
  std::vector<double> gammas{1e2, 1e4, 1e6};
  double h = 0.125;
  std::size_t ssa_paths = 100;
  StopRule stop{};
  std::uint64_t seed = kDefaultSeed;
};

/// delta = max_j (2|p_j| - 2), clamped at 0.
int step_exponent(const ReactionNetwork& net);

/// Scales the initial state and bounds of `base` by gamma.
ReactionNetwork scaled_network(const ReactionNetwork& base, double gamma);

/// For each gamma: tau = h gamma^-delta, Work_TL = mean realized bridge steps,
/// Work_SSA = mean SSA jump count, relative error from lhs_approx of g(x/gamma).
std::vector<WorkComparisonRow> work_comparison_experiment(const ReactionNetwork& base,
                                                          const Observable& g,
                                                          const WorkComparisonOptions& options);

}  // namespace tauleap
