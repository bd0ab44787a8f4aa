#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "gkflow/complex_structure.hpp"
#include "gkflow/connection.hpp"
#include "gkflow/flows.hpp"
#include "gkflow/forms.hpp"
#include "gkflow/integrator.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow/static_analysis.hpp"
#include "gkflow/verification.hpp"

using namespace gkflow;

namespace {

BackendPtr torus(int n, int order) {
  const double l = 2 * std::numbers::pi;
  return make_torus({n, n, n, n}, {l, l, l, l}, order);
}

Metric metric(int n, int order) {
  std::mt19937_64 rng(1);
  return random_smooth_metric(torus(n, order), rng, 0.1);
}

void BM_ExteriorDerivative(benchmark::State& st) {
  std::mt19937_64 rng(2);
  const auto a = random_smooth_field(torus(static_cast<int>(st.range(0)), 4), {Index::Lower, Index::Lower},
                                     Symmetry::Antisymmetric, rng, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(exterior_derivative(a));
}
BENCHMARK(BM_ExteriorDerivative)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Codifferential(benchmark::State& st) {
  const auto g = metric(static_cast<int>(st.range(0)), 4);
  std::mt19937_64 rng(3);
  const auto a = random_smooth_field(g.backend(), {Index::Lower, Index::Lower, Index::Lower},
                                     Symmetry::Antisymmetric, rng, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(codifferential(g, a));
}
BENCHMARK(BM_Codifferential)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Riemann(benchmark::State& st) {
  const auto g = metric(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(riemann(g));
}
BENCHMARK(BM_Riemann)->Args({8, 4})->Args({16, 4})->Args({8, 0})->Unit(benchmark::kMillisecond);

void BM_Nijenhuis(benchmark::State& st) {
  std::mt19937_64 rng(4);
  const auto j = random_complex_structure(torus(static_cast<int>(st.range(0)), 4), rng, 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(nijenhuis(j));
}
BENCHMARK(BM_Nijenhuis)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GKResiduals(benchmark::State& st) {
  const auto s = torus_gk_state(static_cast<int>(st.range(0)), 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(gk_residuals(s));
}
BENCHMARK(BM_GKResiduals)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CoupledRhs(benchmark::State& st) {
  const auto s = torus_gk_state(static_cast<int>(st.range(0)), 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(gk_coupled_rhs(s));
}
BENCHMARK(BM_CoupledRhs)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CoupledStep(benchmark::State& st) {
  FlowProblem p;
  p.initial = torus_gk_state(static_cast<int>(st.range(0)), 0.2);
  p.dt = 0.01;
  p.steps = 1;
  for (auto _ : st) benchmark::DoNotOptimize(integrate(p));
}
BENCHMARK(BM_CoupledStep)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_HopfSample(benchmark::State& st) {
  const std::array<double, 4> x{0.7, 0.1, -0.4, 0.5};
  for (auto _ : st) benchmark::DoNotOptimize(hopf_static_point(x));
}
BENCHMARK(BM_HopfSample)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
