#include "tauleap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tauleap/error.hpp"

namespace tauleap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t path_index)
    : master_seed_(master_seed),
      path_index_(path_index),
      engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(path_index + 0x632be59bd9b4e019ULL))) {}

double RngStream::uniform() { return std::generate_canonical<double, 53>(engine_); }

std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw ArgumentError("poisson mean must be finite and nonnegative, got " + std::to_string(mean));
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng.engine());
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("binomial p outside [0,1]: " + std::to_string(p));
  if (n < 0) throw ArgumentError("binomial n must be nonnegative");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const double np = static_cast<double>(n) * p;
  if (np > kBinomialNormalThreshold) {
    const double draw = sample_normal(np, std::sqrt(np * (1.0 - p)), rng);
    const auto k = static_cast<std::int64_t>(std::llround(draw));
    return std::clamp<std::int64_t>(k, 0, n);
  }
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng.engine());
}

double sample_exponential(double rate, RngStream& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ArgumentError("exponential rate must be positive");
  std::exponential_distribution<double> dist(rate);
  return dist(rng.engine());
}

double sample_normal(double mean, double stddev, RngStream& rng) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(rng.engine());
}

std::size_t sample_categorical(std::span<const double> weights, RngStream& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ArgumentError("categorical weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ArgumentError("categorical weights are all zero");
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (target < acc) return k;
  }
  return last_positive;
}

}  // namespace tauleap
