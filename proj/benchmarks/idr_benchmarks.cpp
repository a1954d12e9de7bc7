#include <benchmark/benchmark.h>

#include <random>

#include "idr/linalg.hpp"
#include "idr/lsr.hpp"
#include "idr/solver.hpp"
#include "idr/spectral.hpp"
#include "idr/synthgen.hpp"

namespace {

using namespace idr;

Matrix unit_random(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix x(d, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  x.colwise().normalize();
  return x;
}

void BM_SolverIteration(benchmark::State& state) {
  const Matrix x = unit_random(20, state.range(0), 1);
  SolverConfig cfg;
  cfg.k = 5;
  cfg.maxiter = 10;
  cfg.track_idempotent_residual = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_idr(x, cfg).z_star.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.maxiter);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolverIteration)->Arg(100)->Arg(200)->Arg(250)->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNCubed);

void BM_SolveSpd(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix g = unit_random(n, n, 2);
  Matrix a = g * g.transpose();
  a.diagonal().array() += 1.0;
  const Matrix b = unit_random(n, n, 3);
  const Side side = state.range(1) ? Side::kRight : Side::kLeft;
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(a, b, side).data());
}
BENCHMARK(BM_SolveSpd)->Args({250, 0})->Args({250, 1})->Unit(benchmark::kMicrosecond);

void BM_L21Prox(benchmark::State& state) {
  const Matrix q = unit_random(20, state.range(0), 4) * 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(l21_prox(q, 0.5).data());
}
BENCHMARK(BM_L21Prox)->Arg(250)->Arg(1000);

void BM_Lsr(benchmark::State& state) {
  const Matrix x = unit_random(20, state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(lsr_solve(x, 0.1, true).data());
}
BENCHMARK(BM_Lsr)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_SpectralPartition(benchmark::State& state) {
  SynthSpec spec;
  const SynthData data = generate(spec);
  const AffinityGraph g = build_affinity(lsr_solve(data.x, 0.1, true));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_partition(g, 5, 0).data());
}
BENCHMARK(BM_SpectralPartition)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
