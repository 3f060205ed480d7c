// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kchemo/grid.hpp"
#include "kchemo/kernels.hpp"

using namespace kchemo;

namespace {

constexpr std::size_t kNv = 16;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Omp>
void BM_Transport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto vg = build_velocity_grid(kNv, 1.0);
  const auto f = random_vector(n * kNv, 1);
  std::vector<double> out(f.size());
  const kernels::TransportArgs args{n, kNv, vg.nodes, 0.9 / vg.max_speed(), Boundary::periodic};
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::upwind_transport_omp(args, f, out);
    } else {
      kernels::upwind_transport_reference(args, f, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}

template <bool Omp>
void BM_Collision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto vg = build_velocity_grid(kNv, 1.0);
  const auto f = random_vector(n * kNv, 2);
  const auto rates = random_vector(n * kNv, 3, 0.2);
  std::vector<double> out(f.size());
  const kernels::CollisionArgs args{n, kNv, vg.weights, vg.measure(), 0.1};
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::collision_omp(args, rates, f, out);
    } else {
      kernels::collision_reference(args, rates, f, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}

template <bool Omp>
void BM_CellMatrices(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_vector(4 * kNv * kNv, 4, 1.0 / kNv);
  std::vector<std::size_t> index(n);
  for (std::size_t c = 0; c < n; ++c) index[c] = c % 4;
  auto f = random_vector(n * kNv, 5);
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::apply_cell_matrices_omp(n, kNv, m, index, f);
    } else {
      kernels::apply_cell_matrices_reference(n, kNv, m, index, f);
    }
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}

template <bool Omp>
void BM_Convolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto kernel = random_vector(n, 6);
  const auto field = random_vector(n, 7);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Omp) {
      kernels::circular_convolution_omp(kernel, field, 1e-3, out);
    } else {
      kernels::circular_convolution_reference(kernel, field, 1e-3, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}

}  // namespace

BENCHMARK(BM_Transport<false>)->Name("transport/reference")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_Transport<true>)->Name("transport/omp")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_Collision<false>)->Name("collision/reference")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_Collision<true>)->Name("collision/omp")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_CellMatrices<false>)->Name("cell_matrices/reference")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_CellMatrices<true>)->Name("cell_matrices/omp")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK(BM_Convolution<false>)->Name("convolution/reference")->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_Convolution<true>)->Name("convolution/omp")->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
