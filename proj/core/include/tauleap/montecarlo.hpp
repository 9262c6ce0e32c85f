#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace tauleap {

/// Standard-error stopping rule: stop once z * SE <= rel_target * |mean|
/// with at least min_samples, or at max_samples.
struct StopRule {
  double z = 1.96;
  double rel_target = 0.1;
  std::size_t min_samples = 100;
  std::size_t max_samples = 1'000'000;
  std::size_t workers = 1;
};

/// A path functional: fills `aux` (pre-zeroed) and returns the scalar sample for path `index`.
using PathFunctional = std::function<double(std::uint64_t index, std::span<double> aux)>;

struct MonteCarloResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  bool converged = false;
  std::vector<double> samples;
  /// Mean of the auxiliary vectors over all samples.
  std::vector<double> aux_mean;
};

/// Sample mean with the sequential SE rule. Batches are sized from the
/// current variance estimate (at most doubling the sample count); the
/// result is independent of the worker count.
MonteCarloResult mc_mean(const PathFunctional& functional, std::size_t aux_size,
                         const StopRule& stop);

/// Fixed-size run of exactly n samples (no stopping rule).
MonteCarloResult mc_fixed(const PathFunctional& functional, std::size_t aux_size, std::size_t n,
                          std::size_t workers = 1);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};
SampleStats sample_stats(std::span<const double> samples);

struct EfficiencyIndex {
  double index = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool unstable = false;
};

/// Ratio of means mean(lhs)/mean(rhs) with a percentile bootstrap CI.
/// Flagged unstable (unbounded CI) when the rhs 95% interval contains 0.
EfficiencyIndex efficiency_index(std::span<const double> lhs, std::span<const double> rhs,
                                 std::size_t n_bootstrap = 200, std::uint64_t seed = 1);

}  // namespace tauleap
