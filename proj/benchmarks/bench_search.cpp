#include <benchmark/benchmark.h>

#include <random>

#include "cgq/index.hpp"
#include "cgq/search.hpp"
#include "cgq/workload.hpp"

namespace {

const cgq::CgqIndex& spatial_index() {
  static const cgq::CgqIndex index = cgq::build_index(cgq::spatial_graph());
  return index;
}

std::vector<cgq::Graph> queries(const cgq::Graph& target, std::size_t size, std::size_t count) {
  std::mt19937_64 rng(size);
  std::vector<cgq::Graph> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(cgq::grow_query(target, size, rng));
  return out;
}

// One iteration runs a fixed set of eight queries of the given size.
void BM_CgqTopK(benchmark::State& state) {
  const auto& index = spatial_index();
  const auto qs = queries(index.target(), static_cast<std::size_t>(state.range(0)), 8);
  cgq::SearchParams params;
  params.k = 10;
  for (auto _ : state) {
    for (const auto& q : qs) benchmark::DoNotOptimize(cgq::cgq_topk(q, index, params));
  }
}
BENCHMARK(BM_CgqTopK)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

void BM_CgqBeamWidth(benchmark::State& state) {
  const auto& index = spatial_index();
  const auto qs = queries(index.target(), 4, 8);
  cgq::SearchParams params;
  params.beam_width = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    for (const auto& q : qs) benchmark::DoNotOptimize(cgq::cgq_topk(q, index, params));
  }
}
BENCHMARK(BM_CgqBeamWidth)->Arg(1)->Arg(10)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

// Naive enumeration on a sparse random target, where it completes.
void BM_NaiveVersusCgq(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto target = cgq::random_graph(300, 600, false, rng);
  static const cgq::CgqIndex index = cgq::build_index(target, cgq::IndexParams{4, 20});
  const auto qs = queries(index.target(), 3, 8);
  const bool naive = state.range(0) == 1;
  for (auto _ : state) {
    for (const auto& q : qs) {
      if (naive) {
        const auto w = cgq::weight_vector(q, index.null_model());
        benchmark::DoNotOptimize(cgq::naive_topk(q, index.target(), w, 10, cgq::Scorer::contextual));
      } else {
        benchmark::DoNotOptimize(cgq::cgq_topk(q, index, cgq::SearchParams{}));
      }
    }
  }
  state.SetLabel(naive ? "naive" : "cgq");
}
BENCHMARK(BM_NaiveVersusCgq)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
