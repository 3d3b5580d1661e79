#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cgq/index.hpp"
#include "cgq/search.hpp"

namespace cgq::tools {

struct BenchConfig {
  std::vector<std::size_t> sizes{3, 4, 5, 6, 7, 8};
  std::size_t queries = 30;
  std::uint64_t seed = 1;
  SearchParams search;
  bool oracle = false;
  /// Wall-clock cap per oracle run; a run that hits it counts at the cap.
  double oracle_budget_seconds = 4.0;
  std::size_t jobs = 1;
};

struct QueryTiming {
  double cgq_seconds = 0.0;
  double oracle_seconds = 0.0;
  bool oracle_complete = true;
  bool scores_agree = true;  // meaningful only when the oracle completed
};

struct BenchRow {
  std::size_t size = 0;
  std::vector<QueryTiming> runs;
  double cgq_mean_ms() const;
  double cgq_median_ms() const;
  double oracle_mean_ms() const;
  /// Ratio of mean oracle time to mean cgq time. A lower bound whenever some
  /// oracle run was cut off by the budget.
  double speedup() const;
  std::size_t oracle_timeouts() const;
  std::size_t disagreements() const;
};

/// Queries for each size are grown from the target with one generator seeded
/// by `seed`, so the query sets do not depend on `jobs`.
std::vector<BenchRow> run_bench(const CgqIndex& index, const BenchConfig& config);

}  // namespace cgq::tools
