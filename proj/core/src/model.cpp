#include "tauleap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

Reaction Reaction::mass_action(std::vector<int> nu, double rate) {
  Reaction r;
  r.orders.resize(nu.size());
  std::transform(nu.begin(), nu.end(), r.orders.begin(),
                 [](int v) { return v < 0 ? -v : 0; });
  r.nu = std::move(nu);
  r.rate = rate;
  return r;
}

int Reaction::order() const { return std::accumulate(orders.begin(), orders.end(), 0); }

// Observable ------------------------------------------------------------------

Observable Observable::monomial(std::size_t dim, std::size_t species, int power, double coeff) {
  Term t{coeff, std::vector<int>(dim, 0)};
  t.exponents.at(species) = power;
  return Observable{{t}};
}

Observable Observable::total(std::size_t dim) {
  Observable g;
  for (std::size_t i = 0; i < dim; ++i) g.terms.push_back(monomial(dim, i, 1).terms.front());
  return g;
}

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

template <typename T>
double observable_value(const Observable& g, std::span<const T> x) {
  double sum = 0.0;
  for (const auto& term : g.terms) {
    if (term.exponents.size() != x.size())
      throw ConfigError("observable term dimension does not match state dimension");
    double prod = term.coeff;
    for (std::size_t i = 0; i < x.size(); ++i) prod *= ipow(static_cast<double>(x[i]), term.exponents[i]);
    sum += prod;
  }
  return sum;
}

template <typename T>
std::vector<double> observable_gradient(const Observable& g, std::span<const T> x) {
  std::vector<double> grad(x.size(), 0.0);
  for (const auto& term : g.terms) {
    if (term.exponents.size() != x.size())
      throw ConfigError("observable term dimension does not match state dimension");
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int ei = term.exponents[i];
      if (ei == 0) continue;
      double prod = term.coeff * ei * ipow(static_cast<double>(x[i]), ei - 1);
      for (std::size_t k = 0; k < x.size(); ++k)
        if (k != i) prod *= ipow(static_cast<double>(x[k]), term.exponents[k]);
      grad[i] += prod;
    }
  }
  return grad;
}

}  // namespace

double Observable::value(std::span<const double> x) const { return observable_value(*this, x); }
std::vector<double> Observable::gradient(std::span<const double> x) const {
  return observable_gradient(*this, x);
}
double Observable::value(std::span<const std::int64_t> x) const { return observable_value(*this, x); }
std::vector<double> Observable::gradient(std::span<const std::int64_t> x) const {
  return observable_gradient(*this, x);
}

Observable Observable::scaled(double scale) const {
  Observable out = *this;
  for (auto& term : out.terms) {
    const int degree = std::accumulate(term.exponents.begin(), term.exponents.end(), 0);
    term.coeff /= std::pow(scale, degree);
  }
  return out;
}

// Propensities ------------------------------------------------------------------

double propensity(const Reaction& reaction, std::span<const std::int64_t> state) {
  if (state.size() != reaction.orders.size())
    throw ConfigError("state dimension does not match reaction dimension");
  double a = reaction.rate;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const int r = reaction.orders[i];
    const std::int64_t x = state[i];
    if (x < r) return 0.0;
    for (int k = 0; k < r; ++k) a *= static_cast<double>(x - k);
  }
  return a;
}

double propensities(const ReactionNetwork& net, std::span<const std::int64_t> state,
                    std::span<double> out) {
  double a0 = 0.0;
  for (std::size_t j = 0; j < net.reactions.size(); ++j) {
    out[j] = propensity(net.reactions[j], state);
    a0 += out[j];
  }
  return a0;
}

double smooth_factor(int order, double x) {
  switch (order) {
    case 0:
      return 1.0;
    case 1:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return x;
      return x * x * x * (6.0 - 8.0 * x + 3.0 * x * x);
    case 2: {
      if (x <= 1.0) return 0.0;
      if (x >= 2.0) return x * (x - 1.0);
      const double t = x - 1.0;
      return t * t * t * (9.0 - 11.0 * t + 4.0 * t * t);
    }
    default: {
      if (x <= order - 1) return 0.0;
      double f = 1.0;
      for (int k = 0; k < order; ++k) f *= x - k;
      return f;
    }
  }
}

double smooth_factor_derivative(int order, double x) {
  switch (order) {
    case 0:
      return 0.0;
    case 1:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return x * x * (18.0 - 32.0 * x + 15.0 * x * x);
    case 2: {
      if (x <= 1.0) return 0.0;
      if (x >= 2.0) return 2.0 * x - 1.0;
      const double t = x - 1.0;
      return t * t * (27.0 - 44.0 * t + 20.0 * t * t);
    }
    default: {
      if (x <= order - 1) return 0.0;
      // d/dx prod_k (x - k) = sum_k prod_{l != k} (x - l)
      double sum = 0.0;
      for (int k = 0; k < order; ++k) {
        double p = 1.0;
        for (int l = 0; l < order; ++l)
          if (l != k) p *= x - l;
        sum += p;
      }
      return sum;
    }
  }
}

SmoothValue extend_propensity_smooth(const Reaction& reaction, std::span<const double> point) {
  if (point.size() != reaction.orders.size())
    throw ConfigError("point dimension does not match reaction dimension");
  SmoothValue out{reaction.rate, false};
  for (std::size_t i = 0; i < point.size(); ++i) {
    const int r = reaction.orders[i];
    if (r > 2) out.reduced_smoothness = true;
    out.value *= smooth_factor(r, point[i]);
  }
  return out;
}

std::vector<double> propensity_gradient(const Reaction& reaction, std::span<const double> point) {
  const std::size_t d = point.size();
  if (d != reaction.orders.size())
    throw ConfigError("point dimension does not match reaction dimension");
  std::vector<double> f(d), df(d), grad(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    f[i] = smooth_factor(reaction.orders[i], point[i]);
    df[i] = smooth_factor_derivative(reaction.orders[i], point[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (df[i] == 0.0) continue;
    double g = reaction.rate * df[i];
    for (std::size_t k = 0; k < d; ++k)
      if (k != i) g *= f[k];
    grad[i] = g;
  }
  return grad;
}

std::vector<double> propensity_gradient(const Reaction& reaction,
                                        std::span<const std::int64_t> state) {
  std::vector<double> x(state.begin(), state.end());
  return propensity_gradient(reaction, std::span<const double>(x));
}

// Validation ---------------------------------------------------------------------

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) os << "\n  - " << v.message;
  return os.str();
}

ValidationReport validate_network(const ReactionNetwork& net) {
  ValidationReport rep;
  auto add = [&](Violation::Kind kind, int j, std::string msg) {
    rep.violations.push_back({kind, j, std::move(msg)});
  };
  const std::size_t d = net.dim();

  bool dims_ok = true;
  if (net.initial_state.size() != d || net.conservation.size() != d || net.state_bounds.size() != d) {
    add(Violation::Kind::dimension, -1,
        "initial state, conservation vector and state bounds must all have one entry per species");
    dims_ok = false;
  }
  for (std::size_t j = 0; j < net.channels(); ++j) {
    const auto& r = net.reactions[j];
    if (r.nu.size() != d || r.orders.size() != d) {
      add(Violation::Kind::dimension, static_cast<int>(j),
          "reaction " + std::to_string(j) + ": nu/orders dimension differs from species count");
      dims_ok = false;
    }
    if (!(r.rate > 0.0) || !std::isfinite(r.rate))
      add(Violation::Kind::rate, static_cast<int>(j),
          "reaction " + std::to_string(j) + ": rate constant must be positive and finite");
  }
  if (!dims_ok) return rep;

  for (std::size_t i = 0; i < d; ++i)
    if (!(net.conservation[i] > 0.0))
      add(Violation::Kind::conservation_sign, -1,
          "conservation vector entry " + std::to_string(i) + " must be strictly positive");

  const State origin(d, 0);
  for (std::size_t j = 0; j < net.channels(); ++j) {
    const auto& r = net.reactions[j];
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += net.conservation[i] * r.nu[i];
    if (dot > 0.0) {
      std::ostringstream os;
      os << "reaction " << j << ": n . nu = " << dot << " > 0 (population not bounded by the hyperplane)";
      add(Violation::Kind::hyperplane, static_cast<int>(j), os.str());
    }
    if (propensity(r, origin) != 0.0)
      add(Violation::Kind::propensity_at_origin, static_cast<int>(j),
          "reaction " + std::to_string(j) + ": propensity is nonzero at the origin");
    for (std::size_t i = 0; i < d; ++i)
      if (r.orders[i] < -r.nu[i]) {
        add(Violation::Kind::leaves_lattice, static_cast<int>(j),
            "reaction " + std::to_string(j) + ": reactant order of species " + std::to_string(i) +
                " is below the consumed count, so a jump can leave Z_+^d");
        break;
      }
  }

  for (std::size_t i = 0; i < d; ++i)
    if (net.initial_state[i] < 0 || net.initial_state[i] > net.state_bounds[i]) {
      add(Violation::Kind::initial_out_of_bounds, -1,
          "initial state component " + std::to_string(i) + " outside [0, x_max]");
    }

  // Every x >= 0 with n.x <= n.X0 has x_i <= n.X0 / n_i.
  bool positive = std::all_of(net.conservation.begin(), net.conservation.end(),
                              [](double v) { return v > 0.0; });
  if (positive) {
    double level = 0.0;
    for (std::size_t i = 0; i < d; ++i) level += net.conservation[i] * net.initial_state[i];
    for (std::size_t i = 0; i < d; ++i) {
      const double reach = std::floor(level / net.conservation[i] + 1e-9);
      if (reach > static_cast<double>(net.state_bounds[i])) {
        std::ostringstream os;
        os << "x_max[" << i << "] = " << net.state_bounds[i]
           << " does not cover the reachable simplex (needs " << reach << ")";
        add(Violation::Kind::bounds_too_small, -1, os.str());
      }
    }
  }
  return rep;
}

}  // namespace tauleap
