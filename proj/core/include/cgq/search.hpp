#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "cgq/context.hpp"
#include "cgq/graph.hpp"
#include "cgq/index.hpp"
#include "cgq/similarity.hpp"

namespace cgq {

enum class Scorer : std::uint8_t { contextual, traditional };

std::string_view to_string(Scorer s);
Scorer parse_scorer(std::string_view text);

struct SearchParams {
  std::size_t k = 10;
  std::size_t beam_width = 50;
  Scorer scorer = Scorer::contextual;
  bool dedup = true;
  std::uint64_t rng_seed = 0;  // search is deterministic; kept for reproducible configs
  bool audit = false;

  /// Throws ValidationError when k or beam_width is zero.
  void validate() const;
};

/// Optional hard constraints on candidate pairs. Applied to seeds and to every
/// extension, so maximality is judged over allowed pairs only.
struct PairFilter {
  std::function<bool(EdgeId query, EdgeId target)> edge;
  std::function<bool(NodeId query, NodeId target)> node;

  bool allows_edge(EdgeId q, EdgeId t) const { return !edge || edge(q, t); }
  bool allows_node(NodeId q, NodeId t) const { return !node || node(q, t); }
};

/// Score descending, then signature ascending, then node map ascending.
struct RankOrder {
  bool operator()(const ScoredMatch& a, const ScoredMatch& b) const;
};

/// Best-k matches. With dedup, one entry per signature and a repeated signature
/// keeps the lexicographically smaller node map; without, distinct node maps
/// are held separately.
class AnswerSet {
 public:
  explicit AnswerSet(std::size_t k, bool dedup = true);

  /// Returns true when the match is held after the call.
  bool offer(ScoredMatch match);
  /// k-th best score, or -infinity while fewer than k are held.
  double least_value() const;
  std::size_t size() const noexcept { return held_.size(); }
  std::size_t capacity() const noexcept { return k_; }
  std::vector<ScoredMatch> ranked() const { return {held_.begin(), held_.end()}; }

 private:
  std::size_t k_;
  bool dedup_;
  std::set<ScoredMatch, RankOrder> held_;
};

/// All one-pair extensions of m that keep the node map injective and consistent.
std::vector<Mapping> extend(const Mapping& m, const Graph& q, const Graph& t, const PairFilter& filter = {});

/// One-edge mappings of query edge eq onto target edge et: one orientation when
/// directed, two when undirected (fewer if filtered).
std::vector<Mapping> seed_mappings(const Graph& q, const Graph& t, EdgeId eq, EdgeId et,
                                   const PairFilter& filter = {});

struct NaiveOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::size_t max_states = std::numeric_limits<std::size_t>::max();
  PairFilter filter;
};

struct NaiveEnumeration {
  std::vector<Mapping> maximal;  // one per signature, ascending signature
  bool complete = true;          // false when the deadline or state cap cut the run short
  std::size_t states = 0;
};

/// Grows every seed through every extension and keeps the mappings with no extension.
NaiveEnumeration enumerate_mcs_naive(const Graph& q, const Graph& t, const NaiveOptions& options = {});

struct NaiveResult {
  std::vector<ScoredMatch> matches;
  bool complete = true;
  std::size_t states = 0;
};

NaiveResult naive_topk(const Graph& q, const Graph& t, const WeightVector& w, std::size_t k, Scorer scorer,
                       const NaiveOptions& options = {});

enum class PruneKind : std::uint8_t { query_edge, tree_node, seed, state };

struct PruneRecord {
  PruneKind kind;
  double bound;
  double threshold;
};

struct SearchStats {
  std::size_t tree_nodes_visited = 0;
  std::size_t leaf_batches = 0;
  std::size_t seeds = 0;
  std::size_t states_expanded = 0;
  std::size_t maximal_found = 0;
  std::size_t pruned = 0;
  std::vector<PruneRecord> audit;  // filled only when SearchParams::audit is set
};

struct SearchResult {
  std::vector<ScoredMatch> matches;
  WeightVector weights;
  SearchStats stats;
};

/// Bound-pruned search over the index; returns the same score multiset as
/// naive_topk under the contextual scorer. With the traditional scorer the
/// contextual top-k is reranked by traditional similarity.
/// Throws SchemaMismatch when the query schema or direction differs from the target.
SearchResult cgq_topk(const Graph& q, const CgqIndex& index, const SearchParams& params);
SearchResult cgq_topk(const Graph& q, const CgqIndex& index, const SearchParams& params, const WeightVector& w,
                      const PairFilter& filter);

/// Every connected maximal common subgraph scoring at least r.
SearchResult cgq_range(const Graph& q, const CgqIndex& index, double r, bool audit = false);
SearchResult cgq_range(const Graph& q, const CgqIndex& index, double r, const WeightVector& w,
                       const PairFilter& filter, bool audit = false);

/// Tolerance for floating-point bound comparisons.
inline constexpr double kPruneSlack = 1e-10;

}  // namespace cgq
