#include <benchmark/benchmark.h>

#include <random>

#include "epspectra/epn_models.hpp"
#include "epspectra/epn_perturbation.hpp"
#include "epspectra/ic_spectral.hpp"
#include "epspectra/iep_basis.hpp"

namespace ep = epspectra;
using ep::numerics::ComplexMatrix;

namespace {

ComplexMatrix random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {nd(rng), nd(rng)};
  return m;
}

void BM_EigBiorthogonal(benchmark::State& state) {
  const auto m = random_matrix(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ep::numerics::eig_biorthogonal(m));
}
BENCHMARK(BM_EigBiorthogonal)->Arg(16)->Arg(64)->Arg(128);

void BM_SecularDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ComplexMatrix v = random_matrix(n, 2);
  v /= ep::numerics::norm2(v);
  for (auto _ : state)
    benchmark::DoNotOptimize(ep::epn::solve_secular(v, 1e-4, ep::epn::SecularMode::direct()));
}
BENCHMARK(BM_SecularDirect)->DenseRange(2, 5);

void BM_SecularSeries(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ComplexMatrix v = random_matrix(n, 3);
  v /= ep::numerics::norm2(v);
  for (auto _ : state)
    benchmark::DoNotOptimize(ep::epn::solve_secular(v, 1e-4, ep::epn::SecularMode::series(20)));
}
BENCHMARK(BM_SecularSeries)->DenseRange(2, 5);

void BM_EpSweep(benchmark::State& state) {
  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[i] = 0.999 * i / 199.0;
  for (auto _ : state) {
    ep::epn::EPNModel m;
    m.half_dimension = static_cast<int>(state.range(0));
    m.coupling_direction = ep::epn::coalescing_direction(m.half_dimension);
    benchmark::DoNotOptimize(ep::epn::ep_sweep(m, grid));
  }
}
BENCHMARK(BM_EpSweep)->Arg(1)->Arg(3);

void BM_IcSpectrum(benchmark::State& state) {
  const auto h = ep::ic::build_bb_matrix({1, state.range(0)});
  for (auto _ : state) benchmark::DoNotOptimize(ep::ic::solve_spectrum(h));
}
BENCHMARK(BM_IcSpectrum)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ChainBasis(benchmark::State& state) {
  const auto h = ep::ic::build_bb_matrix({1, 128});
  const auto sd = ep::ic::solve_spectrum(h);
  const auto ref = ep::ic::solve_spectrum(ep::ic::build_bb_matrix({1, 256}));
  const auto window = ep::numerics::select_levels(sd, ep::ic::converged_levels(sd, ref));
  for (auto _ : state) benchmark::DoNotOptimize(ep::iep::assemble_chain_basis(h, window, 4, 8));
}
BENCHMARK(BM_ChainBasis);

}  // namespace

BENCHMARK_MAIN();
