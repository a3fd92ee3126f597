#include <benchmark/benchmark.h>

#include <random>

#include "rtistab/reference_designs.hpp"
#include "rtistab/simulate.hpp"
#include "rtistab/tune.hpp"

using namespace rtistab;

namespace {

Polynomial random_poly(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1);
  for (double& v : coeffs) {
    v = c(rng);
  }
  coeffs[0] = 1.0;
  return Polynomial(std::move(coeffs));
}

void BM_PolyRoots(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Polynomial p = random_poly(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(poly_roots(p));
  }
}
BENCHMARK(BM_PolyRoots)->Arg(8)->Arg(16)->Arg(32);

void BM_SystemSolve(benchmark::State& state) {
  const ReferenceExample& ex = reference_example("ex13");
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
  const SystemBuilder builder(cf, ex.M);
  for (auto _ : state) {
    benchmark::DoNotOptimize(builder.solve(ex.adjusted_a));
  }
}
BENCHMARK(BM_SystemSolve);

void BM_TunePipeline(benchmark::State& state) {
  const ReferenceExample& ex = reference_example("ex7");
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
  const SystemBuilder builder(cf, {});
  TuneConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tune_pipeline(builder, ex.initial_a, cfg));
  }
}
BENCHMARK(BM_TunePipeline);

void BM_Realization(benchmark::State& state) {
  const ReferenceExample& ex = reference_example("ex9");
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
  const SystemBuilder builder(cf, ex.M);
  const UProduct u =
      make_uproduct(ex.adjusted_a, ex.integer_m, builder.premultiplier(), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_controller(cf, u, ex.fixed_cancel_tol));
  }
}
BENCHMARK(BM_Realization);

void BM_StepResponse(benchmark::State& state) {
  const ReferenceExample& ex = reference_example("ex7");
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);
  const SystemBuilder builder(cf, {});
  const UProduct u =
      make_uproduct(ex.adjusted_a, ex.integer_m, builder.premultiplier(), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_closed_loop(cf, u, false, 30.0, 0.0));
  }
}
BENCHMARK(BM_StepResponse);

}  // namespace

BENCHMARK_MAIN();
