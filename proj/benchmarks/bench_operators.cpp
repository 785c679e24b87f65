#include <benchmark/benchmark.h>

#include "fraccd/cd_analysis.hpp"
#include "fraccd/gamma_ops.hpp"
#include "fraccd/profiles.hpp"

namespace {

using namespace fraccd;

const QuadratureConfig kCfg;
const FracParams kP{1.0, 1};

void BM_FracLaplacianUEps(benchmark::State& state) {
  CounterexampleSpec s;
  s.eps = 0.05;
  const ProfileFunction u = make_u_eps(s);
  for (auto _ : state)
    benchmark::DoNotOptimize(frac_laplacian(u, 0.0, kP, kCfg).value);
}
BENCHMARK(BM_FracLaplacianUEps);

void BM_Gamma2WedgeUEps(benchmark::State& state) {
  CounterexampleSpec s;
  s.eps = 0.05;
  const ProfileFunction u = make_u_eps(s);
  for (auto _ : state)
    benchmark::DoNotOptimize(gamma2(u, 0.0, kP, kCfg).value);
}
BENCHMARK(BM_Gamma2WedgeUEps);

void BM_Gamma2FullVN(benchmark::State& state) {
  CounterexampleSpec s;
  s.eps = 0.05;
  s.cutoff_N = 8.0;
  const ProfileFunction v = make_v_N_eps(s);
  for (auto _ : state)
    benchmark::DoNotOptimize(gamma2_full(v, 0.0625, kP, kCfg).value);
}
BENCHMARK(BM_Gamma2FullVN);

void BM_RegionDecomposition(benchmark::State& state) {
  CounterexampleSpec s;
  s.eps = 0.05;
  const ProfileFunction u = make_u_eps(s);
  for (auto _ : state)
    benchmark::DoNotOptimize(gamma2_region_decomposition(u, kP, kCfg).total().value);
}
BENCHMARK(BM_RegionDecomposition);

}  // namespace

BENCHMARK_MAIN();
