#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <unordered_map>
#include <vector>

namespace cgq {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);
inline constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

enum class FeatureKind : std::uint8_t { numeric, categorical, categorical_set };

std::string_view to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Ordered list of node features. Dimension d is the number of features.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Throws ValidationError when empty or when names repeat.
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  std::size_t dimension() const noexcept { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<FeatureSpec> features_;
};

/// Sorted, duplicate-free list of symbols.
using SymbolSet = std::vector<std::string>;

/// numeric -> double, categorical -> std::string, categorical-set -> SymbolSet.
using FeatureValue = std::variant<double, std::string, SymbolSet>;

std::string format_feature_value(const FeatureValue& value);

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphBuilder;

/// Immutable labeled graph. Nodes are dense 0..|V|-1 and keep their original
/// identifiers as labels; edges are numbered in insertion order.
class Graph {
 public:
  Graph() = default;

  bool directed() const noexcept { return directed_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::string& label(NodeId v) const { return labels_.at(v); }
  std::optional<NodeId> find_node(std::string_view label) const;

  std::span<const FeatureValue> features(NodeId v) const {
    return {features_.at(v).data(), features_.at(v).size()};
  }
  const FeatureValue& feature(NodeId v, std::size_t i) const { return features_.at(v).at(i); }

  /// Edges with v as an endpoint, in EdgeId order. Direction is ignored.
  std::span<const EdgeId> incident_edges(NodeId v) const {
    return {incident_.at(v).data(), incident_.at(v).size()};
  }

  /// Looks up the edge (u, v). For undirected graphs (v, u) matches as well.
  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.directed_ == b.directed_ && a.schema_ == b.schema_ && a.labels_ == b.labels_ &&
           a.features_ == b.features_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;

  bool directed_ = false;
  FeatureSchema schema_;
  std::vector<std::string> labels_;
  std::vector<std::vector<FeatureValue>> features_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  // (src << 32 | dst), with src < dst when undirected
  std::unordered_map<std::uint64_t, EdgeId> edge_lookup_;
  std::map<std::string, NodeId, std::less<>> label_index_;
};

/// Incrementally validated construction of a Graph.
class GraphBuilder {
 public:
  GraphBuilder(FeatureSchema schema, bool directed);

  /// Throws ValidationError on duplicate label, wrong arity or kind, or a
  /// negative / non-finite numeric value.
  NodeId add_node(std::string label, std::vector<FeatureValue> features);

  /// Throws ValidationError on self-loop or duplicate edge.
  EdgeId add_edge(NodeId src, NodeId dst);
  /// Resolves endpoints by label; throws ValidationError("endpoint not found") otherwise.
  EdgeId add_edge(std::string_view src_label, std::string_view dst_label);

  std::size_t node_count() const noexcept { return graph_.labels_.size(); }
  std::size_t edge_count() const noexcept { return graph_.edges_.size(); }

  Graph build() &&;

 private:
  Graph graph_;
};

/// All edges other than e sharing at least one endpoint with e, ascending.
std::vector<EdgeId> adjacent_edges(const Graph& g, EdgeId e);

/// Edges reachable from e in at most `radius` adjacency steps, excluding e.
/// radius = 1 equals adjacent_edges.
std::vector<EdgeId> neighborhood_edges(const Graph& g, EdgeId e, std::size_t radius = 1);

/// Canonical form of a categorical-set cell: sorted and de-duplicated.
SymbolSet canonical_set(std::vector<std::string> symbols);

}  // namespace cgq
