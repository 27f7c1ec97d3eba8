#include <benchmark/benchmark.h>

#include <vector>

#include "symindex/cogarch.hpp"
#include "symindex/functionals.hpp"
#include "symindex/levy_triplet.hpp"
#include "symindex/paths.hpp"
#include "symindex/rng.hpp"
#include "symindex/sampling.hpp"
#include "symindex/symbol_model.hpp"

namespace {

using namespace symindex;

LevyTriplet stable_triplet(double alpha) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{SymmetricStable{alpha, 1.0}};
  return t;
}

SymbolModel stable_model(double alpha) {
  SymbolModel m;
  m.family = LevyFamily{stable_triplet(alpha)};
  return m;
}

void BM_SymbolStable(benchmark::State& state) {
  const LevyTriplet t = stable_triplet(1.5);
  const Vec xi = {2.0};
  for (auto _ : state) benchmark::DoNotOptimize(levy_symbol(t, xi));
}
BENCHMARK(BM_SymbolStable);

void BM_SymbolVarianceGamma(benchmark::State& state) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{VarianceGamma{1.0}};
  const Vec xi = {2.0};
  for (auto _ : state) benchmark::DoNotOptimize(levy_symbol(t, xi));
}
BENCHMARK(BM_SymbolVarianceGamma);

void BM_PreparedEval(benchmark::State& state) {
  LevyTriplet t;
  t.dim = 1;
  t.jumps = JumpKernel{CompoundPoisson{
      2.0, [](double y) { return y > 0.0 && y < 1.0 ? 1.0 : 0.0; }, nullptr, false,
      {1.0}}};
  SymbolModel m;
  m.family = LevyFamily{t};
  PreparedSymbol ps = prepare_symbol(m, Vec{0.0});
  Vec xi = {1.0};
  for (auto _ : state) {
    xi[0] = xi[0] < 64.0 ? xi[0] * 1.01 : 1.0;
    benchmark::DoNotOptimize(ps.eval(xi, {}, nullptr));
  }
}
BENCHMARK(BM_PreparedEval);

void BM_UpperFunctionalGlobal(benchmark::State& state) {
  const SymbolModel m = stable_model(1.5);
  for (auto _ : state) benchmark::DoNotOptimize(H_global(m, 4.0));
}
BENCHMARK(BM_UpperFunctionalGlobal);

void BM_UpperFunctionalLocalSde(benchmark::State& state) {
  SdeComposedFamily f;
  f.driver = stable_triplet(1.2);
  f.phi = [](std::span<const double> x) { return std::vector<Vec>{{x[0]}}; };
  SymbolModel m;
  m.family = f;
  const Vec x = {2.0};
  BallOptimizerConfig cfg;
  cfg.y_grid = 33;
  for (auto _ : state) benchmark::DoNotOptimize(H_local(m, x, 0.5, cfg));
}
BENCHMARK(BM_UpperFunctionalLocalSde);

void BM_StableIncrement(benchmark::State& state) {
  IncrementSampler sampler(stable_triplet(1.5));
  PathRng rng(RngSpec{1}, 0);
  Vec out(1);
  for (auto _ : state) {
    sampler.sample(0.01, rng, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(BM_StableIncrement);

void BM_EulerPath(benchmark::State& state) {
  LevyTriplet driver;
  driver.dim = 1;
  driver.diffusion = {{1.0}};
  IncrementSampler sampler(driver);
  auto phi = [](std::span<const double> x) {
    return std::vector<Vec>{{1.0 + x[0] * x[0]}};
  };
  PathGrid grid{1.0, 256};
  PathRng rng(RngSpec{2}, 0);
  const Vec x0 = {0.0};
  for (auto _ : state) {
    bool ok = walk_sde_path(phi, false, sampler, x0, grid, rng,
                            [](long, double, std::span<const double>) { return true; });
    benchmark::DoNotOptimize(ok);
  }
}
BENCHMARK(BM_EulerPath);

void BM_CogarchPrepare(benchmark::State& state) {
  CogarchParams p;
  p.beta = 1.0;
  p.lambda = 0.05;
  p.delta = 0.95;
  LevyTriplet driver;
  driver.dim = 1;
  driver.diffusion = {{1.0}};
  p.driver = driver;
  CogarchEvaluator ev(p);
  double v = -2.0;
  for (auto _ : state) {
    v = v < 2.0 ? v + 0.01 : -2.0;
    benchmark::DoNotOptimize(ev.prepare(v));
  }
}
BENCHMARK(BM_CogarchPrepare);

void BM_CogarchEval(benchmark::State& state) {
  CogarchParams p;
  p.beta = 1.0;
  p.lambda = 0.05;
  p.delta = 0.95;
  LevyTriplet driver;
  driver.dim = 1;
  driver.diffusion = {{1.0}};
  p.driver = driver;
  CogarchEvaluator ev(p);
  const CogarchPrepared st = ev.prepare(0.5);
  Vec xi = {1.0, 1.0};
  for (auto _ : state) {
    xi[1] = xi[1] < 8.0 ? xi[1] * 1.01 : 1.0;
    benchmark::DoNotOptimize(CogarchEvaluator::eval(st, xi));
  }
}
BENCHMARK(BM_CogarchEval);

}  // namespace

BENCHMARK_MAIN();
