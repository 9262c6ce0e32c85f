#include "tauleap/kbe.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "tauleap/error.hpp"

namespace tauleap {

std::string to_string(GridMode mode) { return mode == GridMode::full ? "full" : "log"; }

GridMode grid_mode_from_string(const std::string& text) {
  if (text == "full") return GridMode::full;
  if (text == "log" || text == "logarithmic") return GridMode::logarithmic;
  throw ConfigError("unknown grid mode '" + text + "' (expected full or log)");
}

// Lattice ---------------------------------------------------------------------

Lattice::Lattice(GridMode mode, std::vector<std::vector<std::int64_t>> nodes)
    : mode_(mode), nodes_(std::move(nodes)) {
  strides_.resize(nodes_.size());
  size_ = 1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& list = nodes_[i];
    if (list.empty() || list.front() != 0)
      throw ConfigError("lattice node lists must start at 0");
    for (std::size_t k = 1; k < list.size(); ++k)
      if (list[k] <= list[k - 1]) throw ConfigError("lattice node lists must be strictly increasing");
    strides_[i] = size_;
    size_ *= list.size();
  }
}

std::size_t Lattice::flatten(std::span<const std::size_t> position) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) k += position[i] * strides_[i];
  return k;
}

State Lattice::point(std::size_t k) const {
  State x(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    x[i] = nodes_[i][k % nodes_[i].size()];
    k /= nodes_[i].size();
  }
  return x;
}

std::size_t Lattice::find(std::size_t i, std::int64_t x) const {
  const auto& list = nodes_[i];
  auto it = std::lower_bound(list.begin(), list.end(), x);
  if (it == list.end() || *it != x) return npos;
  return static_cast<std::size_t>(it - list.begin());
}

std::vector<std::int64_t> log_nodes(std::int64_t x_max, std::size_t points) {
  if (x_max < 0) throw ConfigError("negative lattice bound");
  std::vector<std::int64_t> out;
  for (std::int64_t x = 0; x <= std::min(x_max, kDenseLimit); ++x) out.push_back(x);
  if (x_max <= kDenseLimit) return out;
  if (points < 2) throw ConfigError("logarithmic grid needs at least 2 log-spaced points");
  const double s0 = std::log1p(static_cast<double>(kDenseLimit + 1));
  const double s1 = std::log1p(static_cast<double>(x_max));
  for (std::size_t k = 0; k < points; ++k) {
    const double s = s0 + (s1 - s0) * static_cast<double>(k) / static_cast<double>(points - 1);
    out.push_back(std::clamp<std::int64_t>(std::llround(std::expm1(s)), kDenseLimit + 1, x_max));
  }
  out.push_back(x_max);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Lattice build_lattice(const ReactionNetwork& net, GridMode mode, std::size_t log_points,
                      std::size_t full_grid_cap) {
  if (net.state_bounds.size() != net.dim())
    throw ConfigError("state bounds x_max are required to build a lattice");
  std::vector<std::vector<std::int64_t>> nodes(net.dim());
  double count = 1.0;
  for (std::size_t i = 0; i < net.dim(); ++i) {
    const std::int64_t x_max = net.state_bounds[i];
    if (mode == GridMode::full) {
      count *= static_cast<double>(x_max + 1);
      if (count > static_cast<double>(full_grid_cap)) {
        std::ostringstream os;
        os << "full lattice exceeds " << full_grid_cap << " nodes; use the logarithmic grid mode";
        throw ConfigError(os.str());
      }
      nodes[i].resize(static_cast<std::size_t>(x_max + 1));
      for (std::int64_t x = 0; x <= x_max; ++x) nodes[i][static_cast<std::size_t>(x)] = x;
    } else {
      nodes[i] = log_nodes(x_max, log_points);
    }
  }
  return Lattice(mode, std::move(nodes));
}

Stencil interpolation_stencil(const Lattice& lattice, std::span<const std::int64_t> x) {
  const std::size_t d = lattice.dim();
  std::vector<std::size_t> lo(d), hi(d);
  std::vector<double> w_hi(d, 0.0);
  Stencil st;
  for (std::size_t i = 0; i < d; ++i) {
    std::int64_t xi = x[i];
    if (xi < 0 || xi > lattice.upper(i)) {
      st.clamped = true;
      xi = std::clamp<std::int64_t>(xi, 0, lattice.upper(i));
    }
    const auto& list = lattice.nodes(i);
    auto it = std::lower_bound(list.begin(), list.end(), xi);
    const auto pos = static_cast<std::size_t>(it - list.begin());
    if (*it == xi) {
      lo[i] = hi[i] = pos;
      continue;
    }
    lo[i] = pos - 1;
    hi[i] = pos;
    const double sl = std::log1p(static_cast<double>(list[lo[i]]));
    const double sh = std::log1p(static_cast<double>(list[hi[i]]));
    w_hi[i] = (std::log1p(static_cast<double>(xi)) - sl) / (sh - sl);
  }

  // Tensor product over the dimensions that are off-grid.
  std::vector<std::size_t> pos(d);
  std::vector<std::size_t> off;
  for (std::size_t i = 0; i < d; ++i)
    if (lo[i] != hi[i]) off.push_back(i);
  const std::size_t corners = std::size_t{1} << off.size();
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) pos[i] = lo[i];
    for (std::size_t b = 0; b < off.size(); ++b) {
      const std::size_t i = off[b];
      if (mask & (std::size_t{1} << b)) {
        pos[i] = hi[i];
        w *= w_hi[i];
      } else {
        w *= 1.0 - w_hi[i];
      }
    }
    if (w == 0.0) continue;
    st.index.push_back(lattice.flatten(pos));
    st.weight.push_back(w);
  }
  return st;
}

Stencil difference_stencil(const Lattice& lattice, std::span<const std::int64_t> x) {
  const std::size_t d = lattice.dim();
  // Per dimension: node positions and Lagrange weights (a single node when on-grid).
  std::vector<std::vector<std::size_t>> at(d);
  std::vector<std::vector<double>> wt(d);
  Stencil st;
  for (std::size_t i = 0; i < d; ++i) {
    std::int64_t xi = x[i];
    if (xi < 0 || xi > lattice.upper(i)) {
      st.clamped = true;
      xi = std::clamp<std::int64_t>(xi, 0, lattice.upper(i));
    }
    const auto& list = lattice.nodes(i);
    const auto pos = static_cast<std::size_t>(std::lower_bound(list.begin(), list.end(), xi) - list.begin());
    if (list[pos] == xi) {
      at[i] = {pos};
      wt[i] = {1.0};
      continue;
    }
    const std::size_t width = std::min<std::size_t>(4, list.size());
    std::size_t first = pos >= 2 ? pos - 2 : 0;
    first = std::min(first, list.size() - width);
    const double xr = static_cast<double>(xi);
    for (std::size_t a = first; a < first + width; ++a) {
      double w = 1.0;
      for (std::size_t b = first; b < first + width; ++b)
        if (b != a)
          w *= (xr - static_cast<double>(list[b])) / static_cast<double>(list[a] - list[b]);
      at[i].push_back(a);
      wt[i].push_back(w);
    }
  }

  std::vector<std::size_t> digit(d, 0), pos(d);
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      pos[i] = at[i][digit[i]];
      w *= wt[i][digit[i]];
    }
    if (w != 0.0) {
      st.index.push_back(lattice.flatten(pos));
      st.weight.push_back(w);
    }
    std::size_t i = 0;
    while (i < d && ++digit[i] == at[i].size()) digit[i++] = 0;
    if (i == d) break;
  }
  return st;
}

// Backward solve ----------------------------------------------------------------

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

bool inside(const Lattice& lattice, std::span<const std::int64_t> y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < 0 || y[i] > lattice.upper(i)) return false;
  return true;
}

SparseMatrix assemble_generator(const ReactionNetwork& net, const Lattice& lattice) {
  std::vector<Eigen::Triplet<double>> triplets;
  const std::size_t n = lattice.size();
  State y(net.dim());
  for (std::size_t k = 0; k < n; ++k) {
    const State x = lattice.point(k);
    double diag = 0.0;
    for (const auto& r : net.reactions) {
      const double a = propensity(r, x);
      if (a <= 0.0) continue;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + r.nu[i];
      if (!inside(lattice, y)) continue;
      const Stencil st = difference_stencil(lattice, y);
      for (std::size_t s = 0; s < st.index.size(); ++s)
        triplets.emplace_back(static_cast<int>(k), static_cast<int>(st.index[s]), a * st.weight[s]);
      diag -= a;
    }
    if (diag != 0.0) triplets.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
  SparseMatrix A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

// Crank-Nicolson propagator with LU factorizations cached per step size.
class CrankNicolson {
 public:
  explicit CrankNicolson(const SparseMatrix& A) : A_(A) {}

  Vector advance(const Vector& u0, double span, std::size_t steps) {
    const double h = span / static_cast<double>(steps);
    auto& lu = factor(h);
    Vector u = u0;
    for (std::size_t s = 0; s < steps; ++s) {
      Vector rhs = u + 0.5 * h * (A_ * u);
      u = lu.solve(rhs);
      if (lu.info() != Eigen::Success) throw NumericalError("KBE linear solve failed");
    }
    return u;
  }

 private:
  Eigen::SparseLU<SparseMatrix>& factor(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return *it->second;
    SparseMatrix I(A_.rows(), A_.cols());
    I.setIdentity();
    SparseMatrix M = I - 0.5 * h * A_;
    auto lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    lu->compute(M);
    if (lu->info() != Eigen::Success) {
      std::ostringstream os;
      os << "KBE factorization failed for step " << h << ": " << lu->lastErrorMessage()
         << " (matrix size " << M.rows() << ", |A| max " << A_.coeffs().cwiseAbs().maxCoeff() << ")";
      throw NumericalError(os.str());
    }
    return *cache_.emplace(h, std::move(lu)).first->second;
  }

  const SparseMatrix& A_;
  std::map<double, std::unique_ptr<Eigen::SparseLU<SparseMatrix>>> cache_;
};

bool close_time(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::size_t ValueFunction::snapshot(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
  if (it != times.end() && close_time(*it, t)) return static_cast<std::size_t>(it - times.begin());
  std::ostringstream os;
  os << "time " << t << " is not a stored value-function snapshot";
  throw ConfigError(os.str());
}

bool ValueFunction::has_snapshot(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
  return it != times.end() && close_time(*it, t);
}

ValueFunction solve_backward(const ReactionNetwork& net, const Observable& g,
                             std::vector<double> snapshot_times, const KbeOptions& options) {
  const Lattice lattice =
      build_lattice(net, options.mode, options.log_points, options.full_grid_cap);
  return solve_backward(net, g, lattice, std::move(snapshot_times), options);
}

ValueFunction solve_backward(const ReactionNetwork& net, const Observable& g, const Lattice& lattice,
                             std::vector<double> snapshot_times, const KbeOptions& options) {
  if (!options.allow_invalid) {
    const auto report = validate_network(net);
    if (!report.ok()) throw ConfigError("KBE solve requires a valid network:\n" + report.summary());
  }
  if (lattice.dim() != net.dim()) throw ConfigError("lattice dimension does not match the network");

  const double T = net.final_time;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end(), close_time),
                       snapshot_times.end());
  if (snapshot_times.empty() || !close_time(snapshot_times.back(), T))
    throw ConfigError("snapshot times must include the final time");
  if (snapshot_times.front() < 0.0) throw ConfigError("snapshot times must be nonnegative");
  snapshot_times.back() = T;

  const double tol = options.tol > 0.0 ? options.tol
                                       : (lattice.mode() == GridMode::full ? 1e-8 : 1e-6);
  const bool relative = options.relative_tol || (options.tol <= 0.0 && lattice.mode() == GridMode::logarithmic);
  ValueFunction vf;
  vf.lattice = lattice;
  vf.times = snapshot_times;
  vf.observable = g;
  vf.tol = tol;
  for (const auto& r : net.reactions) vf.stoichiometry.push_back(r.nu);

  const std::size_t n = lattice.size();
  Vector u(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) u[static_cast<Eigen::Index>(k)] = g.value(lattice.point(k));

  const SparseMatrix A = assemble_generator(net, lattice);
  CrankNicolson cn(A);

  std::vector<std::vector<double>> values(snapshot_times.size());
  values.back().assign(u.data(), u.data() + n);
  std::size_t m = 1;
  for (std::size_t k = snapshot_times.size() - 1; k-- > 0;) {
    const double span = snapshot_times[k + 1] - snapshot_times[k];
    Vector coarse = cn.advance(u, span, m);
    while (true) {
      if (2 * m > options.max_inner_steps) {
        std::ostringstream os;
        os << "KBE tolerance " << tol << " unreachable within " << options.max_inner_steps
           << " inner steps on [" << snapshot_times[k] << ", " << snapshot_times[k + 1] << "]";
        throw NumericalError(os.str());
      }
      Vector fine = cn.advance(u, span, 2 * m);
      const double err = (fine - coarse).cwiseAbs().maxCoeff() / 3.0;
      const double scale = relative ? std::max(1.0, fine.cwiseAbs().maxCoeff()) : 1.0;
      if (err <= tol * span * scale) {
        u = std::move(fine);
        vf.inner_steps += 2 * m;
        break;
      }
      coarse = std::move(fine);
      m *= 2;
    }
    values[k].assign(u.data(), u.data() + n);
  }
  vf.values = std::move(values);
  return vf;
}

std::vector<double> apply_generator(const ReactionNetwork& net, const Lattice& lattice,
                                    std::span<const double> u) {
  const SparseMatrix A = assemble_generator(net, lattice);
  const Eigen::Map<const Vector> v(u.data(), static_cast<Eigen::Index>(u.size()));
  const Vector out = A * v;
  return {out.data(), out.data() + out.size()};
}

double query_value(const ValueFunction& vf, std::span<const std::int64_t> x, double t, bool* clamped) {
  if (x.size() != vf.lattice.dim()) throw ConfigError("query point dimension mismatch");
  const auto& values = vf.values[vf.snapshot(t)];
  const Stencil st = interpolation_stencil(vf.lattice, x);
  if (clamped && st.clamped) *clamped = true;
  double v = 0.0;
  for (std::size_t s = 0; s < st.index.size(); ++s) v += st.weight[s] * values[st.index[s]];
  return v;
}

double discrete_difference(const ValueFunction& vf, std::span<const std::int64_t> x, double t,
                           std::size_t j, bool* clamped) {
  if (j >= vf.stoichiometry.size()) throw ConfigError("reaction index out of range");
  State y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += vf.stoichiometry[j][i];
  const auto& values = vf.values[vf.snapshot(t)];
  auto evaluate = [&](std::span<const std::int64_t> point) {
    const Stencil st = difference_stencil(vf.lattice, point);
    if (clamped && st.clamped) *clamped = true;
    double v = 0.0;
    for (std::size_t s = 0; s < st.index.size(); ++s) v += st.weight[s] * values[st.index[s]];
    return v;
  };
  return evaluate(y) - evaluate(x);
}

}  // namespace tauleap
