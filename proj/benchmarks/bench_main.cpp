#include <benchmark/benchmark.h>

#include <cmath>

#include "mfns/multifluid.hpp"
#include "mfns/ns_solver.hpp"
#include "mfns/tridiag.hpp"
#include "mfns/young.hpp"

using namespace mfns;

namespace {

const auto kLaws =
    make_laws(PowerlawPressure{1.0, 2.0}, PowerlawViscosity{1.0, 1.0}, LawMode::strict, 1.0);

NSState ns_state(int N) {
  const PeriodicGrid g(1.0, N);
  return NSState{
      0.0,
      ScalarField::sample(g, [](double x) { return 1.0 + 0.1 * std::sin(2.0 * M_PI * x); }),
      ScalarField::sample(g, [](double x) { return 0.1 * std::sin(2.0 * M_PI * x); }),
      0.0};
}

MultifluidState mf_state(int N) {
  const PeriodicGrid g(1.0, N);
  MultifluidState s;
  s.u = ScalarField::sample(g, [](double x) { return 0.1 * std::sin(2.0 * M_PI * x); });
  s.alpha = {ScalarField(g, 0.5), ScalarField(g, 0.5)};
  s.rho_phase = {ScalarField(g, 1.0), ScalarField(g, 2.0)};
  return s;
}

void BM_NsStep(benchmark::State& state) {
  NSState s = ns_state(static_cast<int>(state.range(0)));
  const double dt = stable_dt(s, kLaws, 0.5, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s = ns_step(s, kLaws, dt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NsStep)->Arg(256)->Arg(1024)->Arg(4096);

void BM_MfStep(benchmark::State& state) {
  MultifluidState s = mf_state(static_cast<int>(state.range(0)));
  const double dt = mf_stable_dt(s, kLaws, 0.5, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s = mf_step(s, kLaws, dt));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MfStep)->Arg(256)->Arg(1024)->Arg(4096);

void BM_CyclicTridiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> sub(n, -1.0), diag(n, 4.0), sup(n, -1.0), rhs(n, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_cyclic_tridiagonal(sub, diag, sup, rhs));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CyclicTridiagonal)->Arg(256)->Arg(4096);

void BM_EquivalenceSampling(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(equivalence_check_k2(kLaws, state.range(0), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EquivalenceSampling)->Arg(10000);

void BM_Microstructure(benchmark::State& state) {
  YoungMeasureSpec spec;
  spec.alpha0 = {Profile::constant(0.5), Profile::constant(0.5)};
  spec.rho0 = {Profile::constant(1.0), Profile::constant(2.0)};
  spec.u0 = Profile::sine(0.0, 0.1);
  const int n = static_cast<int>(state.range(0));
  const PeriodicGrid g(1.0, 64 * n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_microstructure(spec, n, g));
  }
}
BENCHMARK(BM_Microstructure)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
