#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "bose_ldp/mc_sampler.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"

using namespace bose_ldp;

namespace {

ModelParams reference_hyl(double mu) {
  ModelParams p;
  p.d = 3;
  p.beta = 1.0;
  p.a = 1.0;
  p.b = 0.1;
  p.mu = mu;
  return p;
}

void BM_BoseG(benchmark::State& state) {
  const double t = std::pow(10.0, static_cast<double>(state.range(0)) / 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(bose_g(2.5, t));
}
BENCHMARK(BM_BoseG)->DenseRange(-6, 2, 2);

void BM_LambertW(benchmark::State& state) {
  const auto branch = state.range(0) == 0 ? Branch::principal : Branch::lower;
  double x = -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w(branch, x));
    x = x < -1e-6 ? x * 0.999 : -0.3;
  }
}
BENCHMARK(BM_LambertW)->Arg(0)->Arg(1);

void BM_PmfDeltaStar(benchmark::State& state) {
  ModelParams p;
  p.d = 3;
  p.beta = 1.0;
  p.alpha = -0.3;
  p.a = 1.0;
  p.mu = 0.01;
  const auto w = make_weights(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pmf_delta_star(p, w));
}
BENCHMARK(BM_PmfDeltaStar);

// Three-root regime of the reference instance.
void BM_HylSolveBranch0(benchmark::State& state) {
  const auto p = reference_hyl(0.05864);
  const auto w = make_weights(p, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hyl_solve_branch0(p, w));
}
BENCHMARK(BM_HylSolveBranch0)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_McmcSteps(benchmark::State& state) {
  ModelParams p;
  p.d = 3;
  p.beta = 1.0;
  p.alpha = -1.0;
  p.mu = 0.5;
  p.a = 100.0;
  SamplerConfig cfg;
  cfg.volume = 1e4;
  cfg.K = static_cast<std::size_t>(state.range(0));
  cfg.chain_length = 100000;
  cfg.thinning = 100;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mcmc_tilted(Model::pmf, p, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.chain_length));
}
BENCHMARK(BM_McmcSteps)->Arg(20)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
