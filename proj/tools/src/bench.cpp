#include "cgq_tools/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "cgq/workload.hpp"

namespace cgq::tools {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

QueryTiming time_query(const Graph& q, const CgqIndex& index, const BenchConfig& config) {
  QueryTiming t;
  auto start = Clock::now();
  auto fast = cgq_topk(q, index, config.search);
  t.cgq_seconds = seconds_since(start);
  if (!config.oracle) return t;
  NaiveOptions options;
  const auto budget = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(config.oracle_budget_seconds));
  start = Clock::now();
  options.deadline = start + budget;
  auto slow = naive_topk(q, index.target(), fast.weights, config.search.k, config.search.scorer, options);
  t.oracle_seconds = std::min(seconds_since(start), config.oracle_budget_seconds);
  t.oracle_complete = slow.complete;
  if (slow.complete) {
    t.scores_agree = slow.matches.size() == fast.matches.size();
    for (std::size_t i = 0; t.scores_agree && i < slow.matches.size(); ++i) {
      t.scores_agree = std::abs(slow.matches[i].score - fast.matches[i].score) <= 1e-9;
    }
  }
  return t;
}

}  // namespace

double BenchRow::cgq_mean_ms() const {
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(r.cgq_seconds * 1e3);
  return mean(xs);
}

double BenchRow::cgq_median_ms() const {
  if (runs.empty()) return 0.0;
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(r.cgq_seconds * 1e3);
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double BenchRow::oracle_mean_ms() const {
  std::vector<double> xs;
  for (const auto& r : runs) xs.push_back(r.oracle_seconds * 1e3);
  return mean(xs);
}

double BenchRow::speedup() const {
  const double c = cgq_mean_ms();
  return c > 0.0 ? oracle_mean_ms() / c : 0.0;
}

std::size_t BenchRow::oracle_timeouts() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.oracle_complete; }));
}

std::size_t BenchRow::disagreements() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.scores_agree; }));
}

std::vector<BenchRow> run_bench(const CgqIndex& index, const BenchConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::vector<BenchRow> rows;
  for (auto size : config.sizes) {
    std::vector<Graph> queries;
    for (std::size_t i = 0; i < config.queries; ++i) queries.push_back(grow_query(index.target(), size, rng));
    BenchRow row;
    row.size = size;
    row.runs.resize(queries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (auto i = next++; i < queries.size(); i = next++) row.runs[i] = time_query(queries[i], index, config);
    };
    const auto jobs = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(queries.size(), 1));
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cgq::tools
