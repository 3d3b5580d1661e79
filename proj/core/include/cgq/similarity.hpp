#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "cgq/context.hpp"
#include "cgq/graph.hpp"

namespace cgq {

/// Per-edge point in [0,1]^d: which features the endpoints conserve.
using AssociationVector = std::vector<double>;

/// How Γ treats a pair of zeros. `definition` yields 1; `strict_zero` yields 0.
enum class ZeroPolicy : std::uint8_t { definition, strict_zero };

/// Min-max ratio of two nonnegative reals. Throws std::invalid_argument on negatives.
double gamma(double x, double y, ZeroPolicy policy = ZeroPolicy::definition);

AssociationVector association_vector(const Graph& g, EdgeId e);

/// Row-major |E| x d table of association vectors.
class AssociationTable {
 public:
  AssociationTable() = default;
  AssociationTable(std::size_t dimension, std::vector<double> values);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : values_.size() / dimension_; }
  std::span<const double> operator[](EdgeId e) const {
    return {values_.data() + static_cast<std::size_t>(e) * dimension_, dimension_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const AssociationTable&, const AssociationTable&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> values_;
};

AssociationTable association_table(const Graph& g);

/// sum_i w_i * Γ(s_q[i], s_t[i]). Throws std::invalid_argument on dimension mismatch.
double edge_similarity(std::span<const double> query, std::span<const double> target, const WeightVector& w,
                       ZeroPolicy policy = ZeroPolicy::definition);

struct NodePair {
  NodeId query = 0;
  NodeId target = 0;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct EdgePair {
  EdgeId query = 0;
  EdgeId target = 0;
  friend auto operator<=>(const EdgePair&, const EdgePair&) = default;
};

/// Injective partial map from query nodes to target nodes together with the
/// matched edge pairs. Both lists are kept sorted.
struct Mapping {
  std::vector<NodePair> nodes;
  std::vector<EdgePair> edges;

  /// Sorted (query edge, target edge) pairs; identifies a common subgraph.
  const std::vector<EdgePair>& signature() const noexcept { return edges; }
  bool empty() const noexcept { return edges.empty(); }
  void canonicalize();

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Throws ValidationError unless the mapping is injective, every edge pair is
/// consistent with the node map (and direction, for directed graphs) and
/// the matched query edges form a connected subgraph.
void validate_mapping(const Mapping& m, const Graph& q, const Graph& t);

struct ScoredMatch {
  Mapping mapping;
  double score = 0.0;
  bool maximal = true;
};

/// Sum of edge similarities over the matched pairs, visited in signature order.
double contextual_score(const Mapping& m, const AssociationTable& query, const AssociationTable& target,
                        const WeightVector& w);

/// Validates m and scores it from the graphs' own association vectors.
double contextual_graph_similarity(const Mapping& m, const Graph& q, const Graph& t, const WeightVector& w);

/// Unweighted mean of per-feature similarities (min-max ratio or equality).
double traditional_node_similarity(std::span<const FeatureValue> u, std::span<const FeatureValue> v,
                                   const FeatureSchema& schema);

/// Sum of node similarities over mapped nodes plus the number of matched edges.
double traditional_graph_similarity(const Mapping& m, const Graph& q, const Graph& t);

/// Best score reachable by growing a common subgraph with `edges_matched` edges.
double mcs_upper_bound(double current_score, std::size_t edges_matched, std::size_t query_edge_count);

/// Best score of any common subgraph seeded from a target edge inside an MBR.
double seed_upper_bound(double cs_to_mbr, std::size_t query_edge_count);

}  // namespace cgq
