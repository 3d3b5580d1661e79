#include "cgq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "cgq/error.hpp"

namespace cgq {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::numeric:
      return "numeric";
    case FeatureKind::categorical:
      return "categorical";
    case FeatureKind::categorical_set:
      return "categorical-set";
  }
  return "unknown";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "numeric") return FeatureKind::numeric;
  if (text == "categorical") return FeatureKind::categorical;
  if (text == "categorical-set") return FeatureKind::categorical_set;
  throw ValidationError("unknown feature kind '" + std::string(text) + "'");
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  if (features_.empty()) throw ValidationError("feature schema must declare at least one feature");
  std::set<std::string_view> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw ValidationError("feature name must not be empty");
    if (!names.insert(f.name).second) {
      throw ValidationError("duplicate feature name '" + f.name + "'");
    }
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::string format_feature_value(const FeatureValue& value) {
  if (const auto* x = std::get_if<double>(&value)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", *x);
    return buf;
  }
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  std::string out;
  for (const auto& sym : std::get<SymbolSet>(value)) {
    if (!out.empty()) out += ',';
    out += sym;
  }
  return out;
}

SymbolSet canonical_set(std::vector<std::string> symbols) {
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  return symbols;
}

std::optional<NodeId> Graph::find_node(std::string_view label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> Graph::find_edge(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  auto it = edge_lookup_.find(std::uint64_t{u} << 32 | v);
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

GraphBuilder::GraphBuilder(FeatureSchema schema, bool directed) {
  if (schema.dimension() == 0) throw ValidationError("feature schema must declare at least one feature");
  graph_.schema_ = std::move(schema);
  graph_.directed_ = directed;
}

NodeId GraphBuilder::add_node(std::string label, std::vector<FeatureValue> features) {
  const auto& schema = graph_.schema_;
  if (features.size() != schema.dimension()) {
    throw ValidationError("node '" + label + "' has " + std::to_string(features.size()) +
                          " feature values, schema declares " + std::to_string(schema.dimension()));
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto& value = features[i];
    switch (schema[i].kind) {
      case FeatureKind::numeric: {
        const auto* x = std::get_if<double>(&value);
        if (x == nullptr) {
          throw ValidationError("node '" + label + "': feature '" + schema[i].name + "' must be numeric");
        }
        if (!std::isfinite(*x) || *x < 0.0) {
          throw ValidationError("node '" + label + "': feature '" + schema[i].name +
                                "' must be finite and non-negative");
        }
        break;
      }
      case FeatureKind::categorical:
        if (!std::holds_alternative<std::string>(value)) {
          throw ValidationError("node '" + label + "': feature '" + schema[i].name + "' must be categorical");
        }
        break;
      case FeatureKind::categorical_set: {
        auto* set = std::get_if<SymbolSet>(&value);
        if (set == nullptr) {
          throw ValidationError("node '" + label + "': feature '" + schema[i].name +
                                "' must be a categorical set");
        }
        *set = canonical_set(std::move(*set));
        break;
      }
    }
  }
  if (graph_.label_index_.contains(label)) throw ValidationError("duplicate node id '" + label + "'");
  const auto id = static_cast<NodeId>(graph_.labels_.size());
  graph_.label_index_.emplace(label, id);
  graph_.labels_.push_back(std::move(label));
  graph_.features_.push_back(std::move(features));
  graph_.incident_.emplace_back();
  return id;
}

EdgeId GraphBuilder::add_edge(NodeId src, NodeId dst) {
  const auto n = graph_.labels_.size();
  if (src >= n || dst >= n) throw ValidationError("edge endpoint not found");
  if (src == dst) throw ValidationError("self-loop on node '" + graph_.labels_[src] + "'");
  auto [lo, hi] = std::pair(src, dst);
  if (!graph_.directed_ && lo > hi) std::swap(lo, hi);
  const auto key = std::uint64_t{lo} << 32 | hi;
  if (graph_.edge_lookup_.contains(key)) {
    throw ValidationError("duplicate edge (" + graph_.labels_[src] + ", " + graph_.labels_[dst] + ")");
  }
  const auto id = static_cast<EdgeId>(graph_.edges_.size());
  graph_.edges_.push_back({src, dst});
  graph_.edge_lookup_.emplace(key, id);
  graph_.incident_[src].push_back(id);
  graph_.incident_[dst].push_back(id);
  return id;
}

EdgeId GraphBuilder::add_edge(std::string_view src_label, std::string_view dst_label) {
  auto src = graph_.find_node(src_label);
  auto dst = graph_.find_node(dst_label);
  if (!src || !dst) {
    const auto missing = src ? dst_label : src_label;
    throw ValidationError("edge endpoint not found: '" + std::string(missing) + "'");
  }
  return add_edge(*src, *dst);
}

Graph GraphBuilder::build() && { return std::move(graph_); }

std::vector<EdgeId> adjacent_edges(const Graph& g, EdgeId e) {
  const auto& edge = g.edge(e);
  std::vector<EdgeId> out;
  for (NodeId v : {edge.src, edge.dst}) {
    for (EdgeId other : g.incident_edges(v)) {
      if (other != e) out.push_back(other);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EdgeId> neighborhood_edges(const Graph& g, EdgeId e, std::size_t radius) {
  if (radius <= 1) return adjacent_edges(g, e);
  std::set<EdgeId> seen{e};
  std::vector<EdgeId> frontier{e};
  for (std::size_t step = 0; step < radius && !frontier.empty(); ++step) {
    std::vector<EdgeId> next;
    for (EdgeId f : frontier) {
      for (EdgeId a : adjacent_edges(g, f)) {
        if (seen.insert(a).second) next.push_back(a);
      }
    }
    frontier = std::move(next);
  }
  seen.erase(e);
  return {seen.begin(), seen.end()};
}

}  // namespace cgq
