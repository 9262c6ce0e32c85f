#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tauleap/model.hpp"

namespace tauleap {

enum class GridMode { full, logarithmic };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& text);

inline constexpr std::size_t kDefaultFullGridCap = 5'000'000;
inline constexpr std::size_t kDefaultLogPoints = 60;
/// Logarithmic lattices contain every integer up to this value.
inline constexpr std::int64_t kDenseLimit = 15;

/// Tensor-product lattice of integer nodes inside the box [0, X_max].
class Lattice {
 public:
  Lattice() = default;
  Lattice(GridMode mode, std::vector<std::vector<std::int64_t>> nodes);

  GridMode mode() const { return mode_; }
  std::size_t dim() const { return nodes_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<std::int64_t>& nodes(std::size_t i) const { return nodes_[i]; }
  const std::vector<std::vector<std::int64_t>>& all_nodes() const { return nodes_; }
  std::int64_t upper(std::size_t i) const { return nodes_[i].back(); }

  /// Flat index of a multi-index of node positions.
  std::size_t flatten(std::span<const std::size_t> position) const;
  /// Integer coordinates of flat node k.
  State point(std::size_t k) const;
  /// Position of value x among the nodes of dimension i, or npos when x is not a node.
  std::size_t find(std::size_t i, std::int64_t x) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  GridMode mode_ = GridMode::full;
  std::vector<std::vector<std::int64_t>> nodes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Node list for one dimension in logarithmic mode: 0..15 plus `points`
/// nodes equispaced in s = log(1+x) from 16 to x_max, rounded and
/// deduplicated.
std::vector<std::int64_t> log_nodes(std::int64_t x_max, std::size_t points);

Lattice build_lattice(const ReactionNetwork& net, GridMode mode,
                      std::size_t log_points = kDefaultLogPoints,
                      std::size_t full_grid_cap = kDefaultFullGridCap);

/// Interpolation stencil: weights over flat lattice indices.
struct Stencil {
  std::vector<std::size_t> index;
  std::vector<double> weight;
  bool clamped = false;
};

/// Stencil of a (possibly off-grid) integer point; multilinear in log(1+x).
/// Components outside [0, X_max] are clamped and flagged.
Stencil interpolation_stencil(const Lattice& lattice, std::span<const std::int64_t> x);

/// Stencil used for shifted neighbours x + nu_j inside the generator and for
/// discrete differences: cubic Lagrange interpolation in x over the four
/// nearest nodes of each off-grid dimension, exact for cubic polynomials.
Stencil difference_stencil(const Lattice& lattice, std::span<const std::int64_t> x);

struct KbeOptions {
  GridMode mode = GridMode::full;
  std::size_t log_points = kDefaultLogPoints;
  /// Error tolerance per unit time; a negative value selects 1e-8 absolute (full)
  /// or 1e-6 relative to max|u| (log).
  double tol = -1.0;
  /// Measure the step-doubling indicator relative to max|u| instead of absolutely.
  bool relative_tol = false;
  std::size_t full_grid_cap = kDefaultFullGridCap;
  std::size_t max_inner_steps = std::size_t{1} << 20;
  /// Solve even when validate_network reports violations.
  bool allow_invalid = false;
};

/// Backward-Kolmogorov solution with snapshots at increasing times.
struct ValueFunction {
  Lattice lattice;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  Observable observable;
  std::vector<std::vector<int>> stoichiometry;
  double tol = 0.0;
  std::size_t inner_steps = 0;

  /// Index of the snapshot at time t; throws ConfigError if t is not stored.
  std::size_t snapshot(double t) const;
  bool has_snapshot(double t) const;
};

/// Integrates du/dt = -A u backward from u(T) = g with Crank-Nicolson and
/// per-interval step doubling. `snapshot_times` must contain T.
ValueFunction solve_backward(const ReactionNetwork& net, const Observable& g,
                             std::vector<double> snapshot_times, const KbeOptions& options = {});

/// Same as solve_backward with a lattice already built.
ValueFunction solve_backward(const ReactionNetwork& net, const Observable& g, const Lattice& lattice,
                             std::vector<double> snapshot_times, const KbeOptions& options = {});

/// Generator applied to a vector of lattice values: (A u)(x) = sum_j a_j(x) (u(x+nu_j) - u(x)).
std::vector<double> apply_generator(const ReactionNetwork& net, const Lattice& lattice,
                                    std::span<const double> u);

double query_value(const ValueFunction& vf, std::span<const std::int64_t> x, double t,
                   bool* clamped = nullptr);

/// u(x + nu_j, t) - u(x, t).
double discrete_difference(const ValueFunction& vf, std::span<const std::int64_t> x, double t,
                           std::size_t j, bool* clamped = nullptr);

/// Snapshot archive (little-endian binary, see README).
void write_archive(const ValueFunction& vf, std::ostream& out);
ValueFunction read_archive(std::istream& in);
void save_archive(const ValueFunction& vf, const std::string& path);
ValueFunction load_archive(const std::string& path);

}  // namespace tauleap
