#include <benchmark/benchmark.h>

#include "lowrank/asym_gd.hpp"
#include "lowrank/eigenspace.hpp"
#include "lowrank/init.hpp"
#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "lowrank/sym_gd.hpp"

namespace {

using namespace lowrank;

Target experiment_target(std::size_t d, std::size_t r) {
  return make_diagonal_target(experiment_spectrum(7.0, 2.0, r, d), d, r);
}

void BM_GdStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Target target = experiment_target(d, 10);
  FactorState x(gaussian_factor(d, 10, 1));
  for (auto _ : state) {
    x = gd_step(x, target, 0.05);
    benchmark::DoNotOptimize(x.x().data());
  }
}
BENCHMARK(BM_GdStep)->Arg(100)->Arg(500)->Arg(1000);

void BM_ApproximationError(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Target target = experiment_target(d, 10);
  const FactorState x(gaussian_factor(d, 10, 1));
  for (auto _ : state) benchmark::DoNotOptimize(approximation_error(x, target));
}
BENCHMARK(BM_ApproximationError)->Arg(100)->Arg(1000);

void BM_RfStep(benchmark::State& state) {
  const Target target = experiment_target(500, 10);
  EigState l(gaussian_factor(500, 10, 1));
  for (auto _ : state) {
    l = rf_step(l, target, 0.05);
    benchmark::DoNotOptimize(l.l().data());
  }
}
BENCHMARK(BM_RfStep);

void BM_RgdStep(benchmark::State& state) {
  const Target target = experiment_target(500, 10);
  EigState l(gaussian_factor(500, 10, 1));
  for (auto _ : state) {
    l = rgd_step(l, target, 0.05);
    benchmark::DoNotOptimize(l.l().data());
  }
}
BENCHMARK(BM_RgdStep);

void BM_AsymStep(benchmark::State& state) {
  const Target target = experiment_target(1000, 10);
  const AsymTarget asym(target.matrix(), 10);
  AsymState s(gaussian_factor(1000, 10, 1), gaussian_factor(1000, 10, 2));
  for (auto _ : state) {
    s = asym_step(s, asym, 0.05, state.range(0) != 0);
    benchmark::DoNotOptimize(s.x().data());
  }
}
BENCHMARK(BM_AsymStep)->Arg(0)->Arg(1);

void BM_SymEig(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix a = Matrix::Random(n, n);
  const Matrix s = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::sym_eig(s));
}
BENCHMARK(BM_SymEig)->Arg(10)->Arg(50);

void BM_SingularValues(benchmark::State& state) {
  const Matrix m = Matrix::Random(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::singular_values(m));
}
BENCHMARK(BM_SingularValues)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
