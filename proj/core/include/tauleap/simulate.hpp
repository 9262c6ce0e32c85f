#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tauleap/history.hpp"
#include "tauleap/model.hpp"
#include "tauleap/rng.hpp"

namespace tauleap {

inline constexpr int kMaxHalvingDepth = 64;

/// A simulated path on its realized time steps. States and per-step channel
/// increments are stored flat (row-major).
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t dim, std::size_t channels, std::vector<double> base_grid);

  std::size_t dim() const { return dim_; }
  std::size_t channels() const { return channels_; }
  std::size_t steps() const { return times_.empty() ? 0 : times_.size() - 1; }

  const std::vector<double>& base_grid() const { return base_grid_; }
  const std::vector<double>& times() const { return times_; }
  double time(std::size_t n) const { return times_[n]; }
  double step_size(std::size_t n) const { return times_[n + 1] - times_[n]; }

  std::span<const std::int64_t> state(std::size_t n) const {
    return {state_data_.data() + n * dim_, dim_};
  }
  std::span<const std::int64_t> terminal_state() const { return state(times_.size() - 1); }
  /// Channel increments of step n (from times[n] to times[n+1]).
  std::span<const std::int64_t> increments(std::size_t n) const {
    return {increment_data_.data() + n * channels_, channels_};
  }
  bool halved(std::size_t n) const { return halved_[n] != 0; }
  /// Base-grid interval containing step n.
  std::size_t base_interval(std::size_t n) const { return base_interval_[n]; }

  std::size_t halvings() const { return halvings_; }
  bool went_negative() const { return went_negative_; }

  void start(double t0, std::span<const std::int64_t> x0);
  void push(double t, std::span<const std::int64_t> x, std::span<const std::int64_t> increments,
            bool halved, std::size_t base_interval);
  void count_halving() { ++halvings_; }

 private:
  std::size_t dim_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> base_grid_;
  std::vector<double> times_;
  std::vector<std::int64_t> state_data_;
  std::vector<std::int64_t> increment_data_;
  std::vector<unsigned char> halved_;
  std::vector<std::size_t> base_interval_;
  std::size_t halvings_ = 0;
  bool went_negative_ = false;
};

struct LeapControl {
  enum class Mode { fixed_grid, pre_leap };
  double epsilon = 0.05;
  double tau_max = std::numeric_limits<double>::infinity();
  Mode mode = Mode::fixed_grid;
};

/// Uniform grid 0, T/N, ..., T.
std::vector<double> uniform_grid(double final_time, std::size_t steps);
/// Grid with every interval split at its midpoint.
std::vector<double> refine_grid(const std::vector<double>& grid);
/// Throws ConfigError unless the grid starts at 0, ends at T and increases.
void check_grid(const std::vector<double>& grid, double final_time);

// Exact SSA -----------------------------------------------------------------

struct SsaSummary {
  State state;
  std::size_t jumps = 0;
};

/// Terminal state and jump count without storing the path.
SsaSummary ssa_terminal(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                        double final_time, RngStream& rng);

/// Full jump path; each step carries a one-hot increment of the firing channel.
/// If the system is absorbed the last state is held to final_time.
Trajectory ssa_path(const ReactionNetwork& net, std::span<const std::int64_t> x0, double final_time,
                    RngStream& rng);

// Tau-leap ------------------------------------------------------------------

/// tau = min_j min(eps a0 / |mu_j|, eps^2 a0^2 / sigma_j^2), clamped to
/// (0, tau_max]. Throws ArgumentError when a0 = 0.
double select_leap_size(const ReactionNetwork& net, std::span<const std::int64_t> state,
                        const LeapControl& control);

struct TauLeapStep {
  State state;
  std::vector<std::int64_t> increments;
};

/// One plain tau-leap step; negative populations are not prevented.
TauLeapStep tau_leap_step(const ReactionNetwork& net, std::span<const std::int64_t> state,
                          double tau, RngStream& rng);

/// Plain tau-leap over base_grid (optionally subdivided by the leap condition).
Trajectory tau_leap_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                         const std::vector<double>& base_grid, RngStream& rng,
                         const LeapControl& control = {});

struct BridgePath {
  Trajectory trajectory;
  ChannelHistory history;
};

/// Poisson-bridge tau-leap: post-leap negativity checks halve the step and
/// bridge the sampled increments; after a halving, steps are shortened so at
/// least one channel lands on its next stored node.
BridgePath bridge_tau_leap_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                                const std::vector<double>& base_grid, RngStream& rng,
                                const LeapControl& control = {});

/// Half-step tau-leap path driven by the same unit-rate processes as
/// `coarse`: increments bridge inside the coarse history and extend it when
/// the fine internal time runs past its end.
Trajectory coupled_refined_path(const ReactionNetwork& net, const BridgePath& coarse, RngStream& rng);

}  // namespace tauleap
