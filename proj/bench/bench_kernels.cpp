// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "memsim/kernels.hpp"
#include "memsim/pulse.hpp"

namespace {

using namespace memsim;

std::vector<double> ramp(std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

template <auto Kernel>
void bm_dephasing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto det = ramp(n, -1e6, 1e6);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 + std::cos(det[i] * 5e-5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(det, w, 8e-6));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void bm_burn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Populations> pops(n, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  std::vector<kernels::PumpRates> rates(n);
  // Every level pumped: the populations settle instead of decaying into
  // subnormals over many iterations.
  for (std::size_t i = 0; i < n; ++i) rates[i] = {i % 4 ? 0.5 : 0.1, 0.2, 0.3};
  const kernels::Branching branching{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (auto _ : state) {
    Kernel(pops, rates, branching);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void bm_propagate(benchmark::State& state) {
  Pulse p;
  p.shape = PulseShape::chs;
  p.width = 0.94e-6;
  p.chirp_bandwidth = 2e6;
  p.rabi_hz = 1.5e6;
  const auto det = ramp(static_cast<std::size_t>(state.range(0)), -1e6, 1e6);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, det, BlochVector::ground()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(bm_dephasing<kernels::serial::dephasing_sum>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_dephasing<kernels::omp::dephasing_sum>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_burn<kernels::serial::burn_step>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_burn<kernels::omp::burn_step>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_propagate<kernels::serial::propagate>)->Arg(8)->Arg(41)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_propagate<kernels::omp::propagate>)->Arg(8)->Arg(41)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
