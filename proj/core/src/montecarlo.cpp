#include "tauleap/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tauleap/error.hpp"
#include "tauleap/rng.hpp"

namespace tauleap {

namespace {

// Samples are reduced in fixed chunks so the floating-point summation order
// does not depend on how chunks are distributed over workers.
constexpr std::size_t kChunk = 32;

struct Accumulator {
  std::vector<double> samples;
  std::vector<double> aux_sum;
};

void run_batch(const PathFunctional& functional, std::size_t aux_size, std::size_t first,
               std::size_t count, std::size_t workers, Accumulator& acc) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> values(count);
  std::vector<std::vector<double>> chunk_aux(chunks, std::vector<double>(aux_size, 0.0));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<double> aux(aux_size);
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(count, lo + kChunk);
        for (std::size_t k = lo; k < hi; ++k) {
          std::fill(aux.begin(), aux.end(), 0.0);
          values[k] = functional(first + k, aux);
          for (std::size_t a = 0; a < aux_size; ++a) chunk_aux[c][a] += aux[a];
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, chunks));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  acc.samples.insert(acc.samples.end(), values.begin(), values.end());
  for (const auto& partial : chunk_aux)
    for (std::size_t a = 0; a < aux_size; ++a) acc.aux_sum[a] += partial[a];
}

MonteCarloResult finish(Accumulator&& acc, bool converged) {
  MonteCarloResult r;
  const auto stats = sample_stats(acc.samples);
  r.mean = stats.mean;
  r.standard_error = stats.standard_error;
  r.n_samples = acc.samples.size();
  r.converged = converged;
  r.aux_mean = std::move(acc.aux_sum);
  for (auto& v : r.aux_mean) v /= static_cast<double>(std::max<std::size_t>(1, r.n_samples));
  r.samples = std::move(acc.samples);
  return r;
}

}  // namespace

SampleStats sample_stats(std::span<const double> samples) {
  SampleStats s;
  const std::size_t n = samples.size();
  if (n == 0) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n < 2) return s;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(n - 1);
  s.standard_error = std::sqrt(s.variance / static_cast<double>(n));
  return s;
}

MonteCarloResult mc_mean(const PathFunctional& functional, std::size_t aux_size,
                         const StopRule& stop) {
  if (stop.min_samples < 2) throw ConfigError("min_samples must be at least 2");
  if (stop.max_samples < stop.min_samples) throw ConfigError("max_samples below min_samples");
  Accumulator acc;
  acc.aux_sum.assign(aux_size, 0.0);

  std::size_t batch = stop.min_samples;
  while (true) {
    run_batch(functional, aux_size, acc.samples.size(), batch, stop.workers, acc);
    const std::size_t n = acc.samples.size();
    const auto stats = sample_stats(acc.samples);
    if (stop.z * stats.standard_error <= stop.rel_target * std::abs(stats.mean))
      return finish(std::move(acc), true);
    if (n >= stop.max_samples) return finish(std::move(acc), false);

    std::size_t want = n;
    if (stats.mean != 0.0) {
      const double ratio = stop.z * std::sqrt(stats.variance) / (stop.rel_target * std::abs(stats.mean));
      const double required = std::ceil(ratio * ratio * 1.05);
      if (required > static_cast<double>(n))
        want = static_cast<std::size_t>(std::min(required - static_cast<double>(n), static_cast<double>(n)));
    }
    batch = std::clamp<std::size_t>(want, std::min<std::size_t>(stop.min_samples, stop.max_samples - n),
                                    stop.max_samples - n);
  }
}

MonteCarloResult mc_fixed(const PathFunctional& functional, std::size_t aux_size, std::size_t n,
                          std::size_t workers) {
  Accumulator acc;
  acc.aux_sum.assign(aux_size, 0.0);
  if (n > 0) run_batch(functional, aux_size, 0, n, workers, acc);
  return finish(std::move(acc), true);
}

EfficiencyIndex efficiency_index(std::span<const double> lhs, std::span<const double> rhs,
                                 std::size_t n_bootstrap, std::uint64_t seed) {
  if (lhs.empty() || rhs.empty()) throw ArgumentError("efficiency index needs nonempty sample sets");
  EfficiencyIndex out;
  const auto ls = sample_stats(lhs);
  const auto rs = sample_stats(rhs);
  out.index = ls.mean / rs.mean;
  if (std::abs(rs.mean) <= 1.96 * rs.standard_error) {
    out.unstable = true;
    out.ci_low = -std::numeric_limits<double>::infinity();
    out.ci_high = std::numeric_limits<double>::infinity();
    return out;
  }
  RngStream rng(seed, 0);
  std::uniform_int_distribution<std::size_t> pick_l(0, lhs.size() - 1), pick_r(0, rhs.size() - 1);
  std::vector<double> ratios(n_bootstrap);
  for (auto& ratio : ratios) {
    double sl = 0.0, sr = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) sl += lhs[pick_l(rng.engine())];
    for (std::size_t k = 0; k < rhs.size(); ++k) sr += rhs[pick_r(rng.engine())];
    ratio = (sl / static_cast<double>(lhs.size())) / (sr / static_cast<double>(rhs.size()));
  }
  std::sort(ratios.begin(), ratios.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(ratios.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, ratios.size() - 1);
    return ratios[lo] + (pos - static_cast<double>(lo)) * (ratios[hi] - ratios[lo]);
  };
  out.ci_low = quantile(0.025);
  out.ci_high = quantile(0.975);
  return out;
}

}  // namespace tauleap
