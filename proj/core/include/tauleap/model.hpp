#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tauleap {

using State = std::vector<std::int64_t>;

/// One reaction channel x -> x + nu with mass-action propensity
/// c * prod_i x_i (x_i - 1) ... (x_i - r_i + 1).
struct Reaction {
  std::vector<int> nu;
  double rate = 0.0;
  /// Reactant order per species; defaults to |min(nu_i, 0)|.
  std::vector<int> orders;

  /// Builds a reaction whose reactant orders follow the stoichiometry.
  static Reaction mass_action(std::vector<int> nu, double rate);

  /// Total reaction order |p_j|.
  int order() const;
};

struct ReactionNetwork {
  std::string name;
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  State initial_state;
  double final_time = 1.0;
  std::vector<double> conservation;
  State state_bounds;
  /// Optional closed-form tag ("decay") used for analytic reference columns.
  std::string analytic;

  std::size_t dim() const { return species.size(); }
  std::size_t channels() const { return reactions.size(); }
};

/// Polynomial observable g(x) = sum_k coeff_k * prod_i x_i^{e_ki}.
struct Observable {
  struct Term {
    double coeff = 0.0;
    std::vector<int> exponents;
  };
  std::vector<Term> terms;

  static Observable monomial(std::size_t dim, std::size_t species, int power, double coeff = 1.0);
  static Observable total(std::size_t dim);

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;

  double value(std::span<const std::int64_t> x) const;
  std::vector<double> gradient(std::span<const std::int64_t> x) const;

  /// g(x / scale): every term is divided by scale^{|e|}.
  Observable scaled(double scale) const;
};

// Propensities -------------------------------------------------------------

/// Raw lattice propensity. Zero whenever some x_i < r_i, so shifted states
/// with negative entries are allowed and return 0.
double propensity(const Reaction& reaction, std::span<const std::int64_t> state);

/// a_0(x) and the per-channel values written into `out` (sized M).
double propensities(const ReactionNetwork& net, std::span<const std::int64_t> state,
                    std::span<double> out);

struct SmoothValue {
  double value = 0.0;
  /// Set when some factor has order > 2 and was clamped instead of extended.
  bool reduced_smoothness = false;
};

/// C^2 nonnegative monotone extension of the propensity to real points.
/// Order-1 factors blend with 6t^3 - 8t^4 + 3t^5 on [0,1]; order-2 factors
/// with 9t^3 - 11t^4 + 4t^5, t = x - 1, on [1,2]; higher orders are clamped.
SmoothValue extend_propensity_smooth(const Reaction& reaction, std::span<const double> point);

/// Analytic gradient of extend_propensity_smooth.
std::vector<double> propensity_gradient(const Reaction& reaction, std::span<const double> point);
std::vector<double> propensity_gradient(const Reaction& reaction,
                                        std::span<const std::int64_t> state);

/// Single-factor extension and its derivative, exposed for testing.
double smooth_factor(int order, double x);
double smooth_factor_derivative(int order, double x);

// Validation ----------------------------------------------------------------

struct Violation {
  enum class Kind {
    dimension,
    rate,
    conservation_sign,
    hyperplane,
    propensity_at_origin,
    leaves_lattice,
    initial_out_of_bounds,
    bounds_too_small,
  };
  Kind kind;
  int reaction = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Structural checks required by the value-function based estimators.
ValidationReport validate_network(const ReactionNetwork& net);

}  // namespace tauleap
