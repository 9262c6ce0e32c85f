#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace tauleap {

inline constexpr std::uint64_t kDefaultSeed = 20100301;

/// Above this n*p the binomial sampler switches to a rounded normal draw.
inline constexpr double kBinomialNormalThreshold = 1e4;

/// Deterministic per-path random stream. The generator state depends only on
/// (master_seed, path_index), so paths can be simulated in any order on any
/// number of workers.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t master_seed, std::uint64_t path_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t path_index() const { return path_index_; }
  engine_type& engine() { return engine_; }

  /// Uniform draw on [0, 1).
  double uniform();

 private:
  std::uint64_t master_seed_;
  std::uint64_t path_index_;
  engine_type engine_;
};

std::int64_t sample_poisson(double mean, RngStream& rng);
std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);
double sample_exponential(double rate, RngStream& rng);
double sample_normal(double mean, double stddev, RngStream& rng);
std::size_t sample_categorical(std::span<const double> weights, RngStream& rng);

}  // namespace tauleap
