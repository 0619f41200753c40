#include <benchmark/benchmark.h>

#include "pco/analysis.hpp"
#include "pco/experiments.hpp"

namespace {

void BM_NominalRun(benchmark::State& state) {
  const auto cfg = pco::experiments::fig2_scenario().base;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pco::run(cfg).events.size());
  }
}

void BM_PerturbedRun(benchmark::State& state) {
  auto cfg = pco::experiments::perturbed_scenario().base;
  cfg.perturbation = pco::Perturbation::sinusoidal_balanced(0.05, 0.5, cfg.n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pco::run(cfg).events.size());
  }
}

void BM_Closeness(benchmark::State& state) {
  auto cfg = pco::experiments::perturbed_scenario().base;
  const pco::HybridArc nominal = pco::run(cfg);
  cfg.perturbation = pco::Perturbation::sinusoidal_balanced(0.05, 0.5, cfg.n);
  const pco::HybridArc perturbed = pco::run(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pco::closeness(nominal, perturbed, 40.0).epsilon_star);
  }
}

}  // namespace

BENCHMARK(BM_NominalRun)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PerturbedRun)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Closeness)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
