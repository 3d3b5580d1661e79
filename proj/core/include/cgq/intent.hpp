#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgq/context.hpp"
#include "cgq/graph.hpp"
#include "cgq/index.hpp"
#include "cgq/search.hpp"
#include "cgq/similarity.hpp"

namespace cgq {

enum class WeightMode : std::uint8_t { individual, averaged };
enum class AggMode : std::uint8_t { min, mean };

std::string_view to_string(WeightMode m);
std::string_view to_string(AggMode m);
WeightMode parse_weight_mode(std::string_view text);
AggMode parse_agg_mode(std::string_view text);

/// One line of a bijection file: node `node_i` of exemplar i corresponds to
/// node `node_j` of exemplar j (0-based exemplar indices, original labels).
struct BijectionEntry {
  std::size_t exemplar_i = 0;
  std::size_t exemplar_j = 0;
  std::string node_i;
  std::string node_j;
};

/// Reads `exemplar_i<TAB>exemplar_j<TAB>node_i<TAB>node_j` lines; `#` starts a comment.
std::vector<BijectionEntry> read_bijections(std::istream& in, const std::string& source = "bijection");

/// Pairwise isomorphic query graphs, each tied to exemplar 0 by a node bijection.
class ExemplarSet {
 public:
  /// `from_first[j][v]` is the node of exemplar j matched to node v of exemplar 0;
  /// from_first[0] must be the identity. Throws ValidationError unless every
  /// map is a bijection that carries edges onto edges (with direction).
  ExemplarSet(std::vector<Graph> exemplars, std::vector<std::vector<NodeId>> from_first,
              WeightMode weight_mode = WeightMode::averaged, AggMode agg_mode = AggMode::min);

  /// Resolves labelled entries. Pairs not involving exemplar 0 must agree with
  /// the composition through exemplar 0.
  static ExemplarSet from_entries(std::vector<Graph> exemplars, const std::vector<BijectionEntry>& entries,
                                  WeightMode weight_mode = WeightMode::averaged, AggMode agg_mode = AggMode::min);

  std::size_t size() const noexcept { return exemplars_.size(); }
  const Graph& exemplar(std::size_t j) const { return exemplars_.at(j); }
  const Graph& first() const { return exemplars_.front(); }
  NodeId node_in(std::size_t j, NodeId v) const { return node_maps_.at(j).at(v); }
  EdgeId edge_in(std::size_t j, EdgeId e) const { return edge_maps_.at(j).at(e); }
  WeightMode weight_mode() const noexcept { return weight_mode_; }
  AggMode agg_mode() const noexcept { return agg_mode_; }
  void set_modes(WeightMode w, AggMode a) noexcept {
    weight_mode_ = w;
    agg_mode_ = a;
  }

 private:
  std::vector<Graph> exemplars_;
  std::vector<std::vector<NodeId>> node_maps_;
  std::vector<std::vector<EdgeId>> edge_maps_;
  WeightMode weight_mode_;
  AggMode agg_mode_;
};

/// Component-wise mean of weight vectors.
WeightVector average_weights(const std::vector<WeightVector>& ws);

/// individual: one vector per exemplar; averaged: a single mean vector.
std::vector<WeightVector> exemplar_weights(const ExemplarSet& es, const NullModel& nm);

/// Carries a mapping from exemplar 0 onto exemplar j through the bijection.
Mapping map_through(const ExemplarSet& es, std::size_t j, const Mapping& m);

struct ExemplarScore {
  std::vector<double> per_exemplar;
  double aggregate = 0.0;
};

/// CGS of m (exemplar 0 -> target) carried to every exemplar, combined by the
/// set's aggregation mode.
ExemplarScore exemplar_similarity(const Mapping& m, const ExemplarSet& es, const Graph& target, const NullModel& nm);

/// Features whose node values agree across all exemplars under the bijections.
std::vector<std::size_t> detect_exact_match_features(const ExemplarSet& es);

/// Features whose association components agree edgewise across all exemplars.
std::vector<std::size_t> detect_exact_relation_features(const ExemplarSet& es);

struct HybridContext {
  std::vector<std::size_t> exact_match;     // F_EM
  std::vector<std::size_t> exact_relation;  // F_ER
  std::vector<std::size_t> free;            // F_C
  /// Per exemplar, weights learned over F_C only (in F_C order).
  std::vector<std::vector<double>> per_exemplar;
  /// Full-length weights: summed per-exemplar F_C weights renormalized, zero on
  /// constrained features. Uniform when F_C is empty.
  WeightVector weights;
  bool all_constraint = false;
};

HybridContext hybrid_context(const ExemplarSet& es, const NullModel& nm);

/// Exact-value node filter for F_EM and exact-component edge filter for F_ER,
/// both against exemplar 0.
PairFilter hybrid_filter(const HybridContext& ctx, const ExemplarSet& es, const CgqIndex& index);

/// Top-k over the index with exemplar 0 as the query, hybrid weights and filters.
SearchResult intent_topk(const ExemplarSet& es, const CgqIndex& index, const SearchParams& params,
                         const HybridContext& ctx);

}  // namespace cgq
