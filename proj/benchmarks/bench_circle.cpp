#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pco/analysis.hpp"
#include "pco/circle.hpp"

namespace {

std::vector<std::vector<double>> points(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, pco::kTwoPi);
  std::vector<std::vector<double>> out(256, std::vector<double>(n));
  for (auto& x : out) {
    for (double& v : x) v = u(rng);
  }
  return out;
}

template <double (*F)(std::span<const double>)>
void run_over_points(benchmark::State& state) {
  const auto xs = points(static_cast<std::size_t>(state.range(0)));
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(F(xs[k++ & 255]));
  }
}

void BM_ShortestArc(benchmark::State& s) { run_over_points<pco::circle::shortest_arc_length>(s); }
void BM_ShortestArcOracle(benchmark::State& s) { run_over_points<pco::circle::shortest_arc_oracle>(s); }
void BM_Lyapunov(benchmark::State& s) { run_over_points<pco::lyapunov>(s); }
void BM_Vtilde(benchmark::State& s) { run_over_points<pco::vtilde>(s); }
void BM_DistanceToSplay(benchmark::State& s) { run_over_points<pco::distance_to_splay>(s); }

}  // namespace

BENCHMARK(BM_ShortestArc)->DenseRange(2, 8, 3)->Arg(64);
BENCHMARK(BM_ShortestArcOracle)->DenseRange(2, 8, 3)->Arg(64);
BENCHMARK(BM_Lyapunov)->DenseRange(2, 8, 3);
BENCHMARK(BM_Vtilde)->DenseRange(2, 8, 3)->Arg(64);
BENCHMARK(BM_DistanceToSplay)->DenseRange(2, 8, 3)->Arg(64);

BENCHMARK_MAIN();
