// Microbenchmarks for the sampling hot paths.
#include <benchmark/benchmark.h>

#include <cmath>

#include "shus/bias.hpp"
#include "shus/experiments.hpp"
#include "shus/kernel.hpp"
#include "shus/model.hpp"
#include "shus/sampler.hpp"

using namespace shus;

namespace {

BiasSpec bench_bias(double a, double alpha) {
  return BiasSpec::validated(RhoSpec{RhoFamily::power, a, 0.0}, alpha, 1.0,
                             gamma_of_alpha(alpha));
}

void BM_Potential(benchmark::State& state) {
  double x = -1.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_well_potential(x, 0.1));
    x += 1e-7;
  }
}
BENCHMARK(BM_Potential);

void BM_ToyMhStep(benchmark::State& state) {
  const ToySystem sys{ToyTarget(0.1)};
  const RhoSpec rho{RhoFamily::power, 0.5, 0.0};
  const std::vector<double> log_theta{std::log(0.5), std::log(0.25),
                                      std::log(0.25)};
  Rng rng(1);
  int x = 0;
  for (auto _ : state) {
    x = mh_step(rng, sys, log_theta, rho, x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_ToyMhStep);

void BM_TwoWellMhStep(benchmark::State& state) {
  const ContinuousSystem sys{ContinuousTarget(4.0, 1.2),
                             Partition::uniform(1.2, 24), ProposalSpec(0.01)};
  const RhoSpec rho{RhoFamily::power, 0.8, 0.0};
  std::vector<double> log_theta(24, std::log(1.0 / 24.0));
  Rng rng(1);
  Point2 x{-1.0, 0.0};
  for (auto _ : state) {
    x = mh_step(rng, sys, log_theta, rho, x);
    benchmark::DoNotOptimize(x.x1);
  }
}
BENCHMARK(BM_TwoWellMhStep);

void BM_ShusUpdate(benchmark::State& state) {
  const auto spec = bench_bias(0.5, 0.8);
  OccupationState occ(std::vector<double>(24, 1.0 / 24.0));
  Rng rng(1);
  for (auto _ : state) {
    occ.shus_update(spec, static_cast<int>(rng() % 24));
    benchmark::DoNotOptimize(occ.log_s());
  }
}
BENCHMARK(BM_ShusUpdate);

void BM_ToyAdaptiveRun(benchmark::State& state) {
  const auto steps = static_cast<std::uint64_t>(state.range(0));
  SamplerConfig cfg;
  cfg.model.kind = ModelSpec::Kind::toy;
  cfg.model.epsilon = 0.1;
  cfg.bias = bench_bias(0.5, 1.0);
  cfg.n_steps = steps;
  cfg.record.scalar_stride = steps;  // recording off the hot path
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run(cfg).theta_final[0]);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_ToyAdaptiveRun)->Arg(100000);

void BM_ReferenceWeights(benchmark::State& state) {
  const ContinuousTarget target(4.0, 1.2);
  const auto part = Partition::uniform(1.2, 24);
  QuadratureSpec quad;
  quad.max_refinements = 0;  // fixed base resolution
  for (auto _ : state)
    benchmark::DoNotOptimize(reference_weights(target, part, quad)[0]);
}
BENCHMARK(BM_ReferenceWeights);

void BM_DeterministicRecursion(benchmark::State& state) {
  const auto spec = bench_bias(0.5, 0.6);
  for (auto _ : state)
    benchmark::DoNotOptimize(toy_deterministic_log_u(10000, spec));
}
BENCHMARK(BM_DeterministicRecursion);

}  // namespace

BENCHMARK_MAIN();
