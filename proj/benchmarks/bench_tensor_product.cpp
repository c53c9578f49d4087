// Microbenchmarks for the tensor-product kernel: cost vs order, vs path
// density, and the quadratic pair-construction sweep.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sphnet/paths.hpp"
#include "sphnet/tensor_product.hpp"

using namespace sphnet;

namespace {

EquivariantVector filled(const IrrepsLayout& lay, double scale) {
  EquivariantVector v(lay);
  for (size_t i = 0; i < v.values.size(); ++i)
    v.values[i] = scale * (0.1 + 0.001 * static_cast<double>(i % 101));
  return v;
}

}  // namespace

static void BM_TpForwardVsOrder(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int C = 32;
  const IrrepsLayout lay = IrrepsLayout::uniform(C, L);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(L));
  const auto x = filled(lay, 1.0);
  const auto y = filled(lay, -1.0);
  const std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(tp_forward(plan, x, y, w));
  state.counters["dense_cost"] = static_cast<double>(dense_cost(plan));
}
BENCHMARK(BM_TpForwardVsOrder)->DenseRange(1, 6);

static void BM_TpForwardVsSparsity(benchmark::State& state) {
  const int L = 6, C = 64;
  const double k = 0.1 * static_cast<double>(state.range(0));
  const IrrepsLayout lay = IrrepsLayout::uniform(C, L);
  const auto universe = enumerate_paths(L);
  const int count =
      static_cast<int>(std::ceil((1.0 - k) * static_cast<double>(universe.size())));
  const std::vector<PathTriple> subset(universe.begin(), universe.begin() + count);
  const auto plan = build_plan(lay, lay, lay, subset);
  const auto x = filled(lay, 1.0);
  const auto y = filled(lay, -1.0);
  const std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(tp_forward(plan, x, y, w));
  state.counters["paths"] = static_cast<double>(count);
}
BENCHMARK(BM_TpForwardVsSparsity)->DenseRange(0, 9);

static void BM_PairConstruction(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int L = 4, C = 8;
  const IrrepsLayout lay = IrrepsLayout::uniform(C, L);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(L));
  const std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
  std::vector<EquivariantVector> feats;
  for (int i = 0; i < N; ++i) feats.push_back(filled(lay, 0.02 * (i + 1)));
  for (auto _ : state) {
    double sink = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        sink += tp_forward(plan, feats[static_cast<size_t>(i)], feats[static_cast<size_t>(j)],
                           w)
                    .values[0];
    benchmark::DoNotOptimize(sink);
  }
  state.counters["pairs"] = static_cast<double>(N * (N - 1) / 2);
}
BENCHMARK(BM_PairConstruction)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
