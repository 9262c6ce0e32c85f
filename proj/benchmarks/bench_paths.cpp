#include <benchmark/benchmark.h>

#include "tauleap/dual.hpp"
#include "tauleap/estimate.hpp"
#include "tauleap/kbe.hpp"
#include "tauleap/simulate.hpp"

using namespace tauleap;

namespace {

ReactionNetwork decay(std::int64_t x0, double c) {
  ReactionNetwork net;
  net.name = "decay";
  net.species = {"X"};
  net.reactions = {Reaction::mass_action({-1}, c)};
  net.initial_state = {x0};
  net.final_time = 1.0;
  net.conservation = {1.0};
  net.state_bounds = {x0};
  return net;
}

ReactionNetwork dimer() {
  ReactionNetwork net;
  net.name = "dimer";
  net.species = {"X1", "X2", "X3"};
  net.reactions = {Reaction::mass_action({-1, 0, 0}, 1.0), Reaction::mass_action({-2, 1, 0}, 0.001),
                   Reaction::mass_action({2, -1, 0}, 0.5), Reaction::mass_action({0, -1, 1}, 0.04)};
  net.initial_state = {100000, 0, 0};
  net.final_time = 1.0;
  net.conservation = {1.0, 2.0, 2.0};
  net.state_bounds = {100000, 50000, 50000};
  return net;
}

void BM_Ssa(benchmark::State& state) {
  const auto net = decay(state.range(0), 1.0);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    benchmark::DoNotOptimize(ssa_terminal(net, net.initial_state, 1.0, rng));
  }
}
BENCHMARK(BM_Ssa)->Arg(100)->Arg(10000);

void BM_BridgePath(benchmark::State& state) {
  const auto net = decay(10, 2.0);
  const auto grid = uniform_grid(1.0, static_cast<std::size_t>(state.range(0)));
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    benchmark::DoNotOptimize(bridge_tau_leap_path(net, net.initial_state, grid, rng));
  }
}
BENCHMARK(BM_BridgePath)->Arg(2)->Arg(64);

void BM_CoupledPair(benchmark::State& state) {
  const auto net = decay(10, 0.2);
  const auto g = Observable::total(1);
  const auto grid = uniform_grid(1.0, 32);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    benchmark::DoNotOptimize(lhs_approx_sample(net, g, grid, rng));
  }
}
BENCHMARK(BM_CoupledPair);

void BM_DimerDual(benchmark::State& state) {
  const auto net = dimer();
  const auto g = Observable::total(3);
  const auto grid = uniform_grid(1.0, static_cast<std::size_t>(state.range(0)));
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    const auto bp = bridge_tau_leap_path(net, net.initial_state, grid, rng);
    benchmark::DoNotOptimize(backward_dual_weights(net, bp.trajectory, g));
  }
}
BENCHMARK(BM_DimerDual)->Arg(256)->Arg(2048);

void BM_KbeDecay(benchmark::State& state) {
  const auto net = decay(10, 0.2);
  const auto g = Observable::total(1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_backward(net, g, uniform_grid(1.0, 32)));
}
BENCHMARK(BM_KbeDecay);

}  // namespace

BENCHMARK_MAIN();
