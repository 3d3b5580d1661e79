#include <benchmark/benchmark.h>

#include <random>

#include "cgq/context.hpp"
#include "cgq/index.hpp"
#include "cgq/workload.hpp"

namespace {

const cgq::Graph& target() {
  static const cgq::Graph g = cgq::spatial_graph();
  return g;
}

void BM_BuildIndex(benchmark::State& state) {
  cgq::IndexParams params;
  params.leaf_threshold = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cgq::build_index(target(), params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(target().edge_count()));
}
BENCHMARK(BM_BuildIndex)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_NullModel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cgq::estimate_null_model(target(), cgq::fit_binner(target())));
}
BENCHMARK(BM_NullModel)->Unit(benchmark::kMillisecond);

void BM_MbrSimilarity(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  std::vector<cgq::AssociationVector> pts(16, cgq::AssociationVector(d));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  const auto box = cgq::mbr_of(pts);
  std::vector<double> q(d);
  for (auto& x : q) x = u(rng);
  const auto w = cgq::normalize_weights(std::vector<double>(d, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(cgq::mbr_similarity(q, w, box));
}
BENCHMARK(BM_MbrSimilarity)->Arg(3)->Arg(5)->Arg(16);

}  // namespace
