#include <benchmark/benchmark.h>

#include "gpwb/assemble.hpp"
#include "gpwb/kempf_ness.hpp"
#include "gpwb/lattice.hpp"
#include "gpwb/moment_maps.hpp"
#include "gpwb/random.hpp"
#include "gpwb/stability.hpp"

using namespace gpwb;

namespace {

LatticePairState pair_state(int n) {
  static SectionCache cache;
  AssemblyParams p;
  p.lattice_size = n;
  p.seed = 7;
  return assemble_example(make_pair_fixture({2, 1}, {0}, {{0, 0}, {1, 0}}, Rational(5, 2)), p, cache);
}

}  // namespace

static void BM_MomentMapTensor(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ProductGroupSpec spec({n, n});
  const RepSpec rep = RepSpec::tensor(n, n);
  Rng rng(1);
  const CVector x = random_vector(n * n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mu_full(x, rep, spec));
}
BENCHMARK(BM_MomentMapTensor)->Arg(2)->Arg(4)->Arg(8);

static void BM_GradientFlow(benchmark::State& state) {
  const ProductGroupSpec spec({2, 3});
  const RepSpec rep = RepSpec::tensor(2, 3);
  const SubgroupSetting setting(spec, {FactorMode::full, FactorMode::frozen}, {1.0, 0.0});
  Rng rng(2);
  const CVector x = random_vector(6, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gradient_flow(x, rep, setting));
}
BENCHMARK(BM_GradientFlow);

static void BM_DbarApply(benchmark::State& state) {
  const auto st = pair_state(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_dbar(st, st.section));
}
BENCHMARK(BM_DbarApply)->Arg(16)->Arg(32)->Arg(64);

static void BM_PointwiseResidual(benchmark::State& state) {
  const auto st = pair_state(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_residual(st));
}
BENCHMARK(BM_PointwiseResidual)->Arg(16)->Arg(32);

static void BM_HeatFlowStep(benchmark::State& state) {
  const auto initial = pair_state(static_cast<int>(state.range(0)));
  LatticeFlowOptions opts;
  opts.max_iter = 1;
  for (auto _ : state) {
    auto st = initial;
    benchmark::DoNotOptimize(heat_flow(st, opts));
  }
}
BENCHMARK(BM_HeatFlowStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_FixtureVerdict(benchmark::State& state) {
  Rng rng(3);
  std::vector<CurveFixture> fixtures;
  for (int i = 0; i < 64; ++i) fixtures.push_back(random_fixture(ExampleKind::twisted_triple, rng));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fixture_stable(fixtures[i++ % fixtures.size()]));
}
BENCHMARK(BM_FixtureVerdict);
BENCHMARK_MAIN();
