#include "cgq/similarity.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cgq/error.hpp"

namespace cgq {

double gamma(double x, double y, ZeroPolicy policy) {
  if (x < 0.0 || y < 0.0) throw std::invalid_argument("gamma requires nonnegative arguments");
  if (x == 0.0 && y == 0.0) return policy == ZeroPolicy::definition ? 1.0 : 0.0;
  return std::min(x, y) / std::max(x, y);
}

namespace {

double feature_similarity(const FeatureValue& a, const FeatureValue& b) {
  if (const auto* x = std::get_if<double>(&a)) return gamma(*x, std::get<double>(b));
  return a == b ? 1.0 : 0.0;
}

}  // namespace

AssociationVector association_vector(const Graph& g, EdgeId e) {
  const auto& edge = g.edge(e);
  const auto u = g.features(edge.src);
  const auto v = g.features(edge.dst);
  AssociationVector s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) s[i] = feature_similarity(u[i], v[i]);
  return s;
}

AssociationTable::AssociationTable(std::size_t dimension, std::vector<double> values)
    : dimension_(dimension), values_(std::move(values)) {
  if (dimension_ == 0 ? !values_.empty() : values_.size() % dimension_ != 0) {
    throw std::invalid_argument("association table size is not a multiple of the dimension");
  }
}

AssociationTable association_table(const Graph& g) {
  const auto d = g.schema().dimension();
  std::vector<double> values;
  values.reserve(g.edge_count() * d);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto s = association_vector(g, e);
    values.insert(values.end(), s.begin(), s.end());
  }
  return AssociationTable(d, std::move(values));
}

double edge_similarity(std::span<const double> query, std::span<const double> target, const WeightVector& w,
                       ZeroPolicy policy) {
  if (query.size() != target.size() || query.size() != w.size()) {
    throw std::invalid_argument("edge_similarity: dimension mismatch");
  }
  double cs = 0.0;
  for (std::size_t i = 0; i < query.size(); ++i) cs += w[i] * gamma(query[i], target[i], policy);
  return cs;
}

void Mapping::canonicalize() {
  std::sort(nodes.begin(), nodes.end());
  std::sort(edges.begin(), edges.end());
}

void validate_mapping(const Mapping& m, const Graph& q, const Graph& t) {
  if (!std::is_sorted(m.nodes.begin(), m.nodes.end()) || !std::is_sorted(m.edges.begin(), m.edges.end())) {
    throw ValidationError("mapping is not canonical");
  }
  std::vector<NodeId> phi(q.node_count(), kNoNode);
  std::set<NodeId> image;
  for (const auto& [u, v] : m.nodes) {
    if (u >= q.node_count() || v >= t.node_count()) throw ValidationError("mapping node out of range");
    if (phi[u] != kNoNode) throw ValidationError("query node mapped twice");
    if (!image.insert(v).second) throw ValidationError("mapping is not injective");
    phi[u] = v;
  }
  std::set<EdgeId> used_q;
  std::set<EdgeId> used_t;
  for (const auto& [eq, et] : m.edges) {
    if (eq >= q.edge_count() || et >= t.edge_count()) throw ValidationError("mapping edge out of range");
    if (!used_q.insert(eq).second || !used_t.insert(et).second) throw ValidationError("edge mapped twice");
    const auto& a = q.edge(eq);
    const auto& b = t.edge(et);
    if (phi[a.src] == kNoNode || phi[a.dst] == kNoNode) throw ValidationError("edge endpoint not in node map");
    const bool forward = phi[a.src] == b.src && phi[a.dst] == b.dst;
    const bool reverse = phi[a.src] == b.dst && phi[a.dst] == b.src;
    if (!(forward || (reverse && !q.directed()))) throw ValidationError("edge pair inconsistent with node map");
  }
  if (m.edges.empty()) {
    if (!m.nodes.empty()) throw ValidationError("node map without edges");
    return;
  }
  // every mapped node is covered and the matched query edges are connected
  std::vector<NodeId> parent(q.node_count());
  for (NodeId v = 0; v < parent.size(); ++v) parent[v] = v;
  auto find = [&](NodeId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::set<NodeId> covered;
  for (const auto& [eq, et] : m.edges) {
    const auto& a = q.edge(eq);
    parent[find(a.src)] = find(a.dst);
    covered.insert(a.src);
    covered.insert(a.dst);
  }
  if (covered.size() != m.nodes.size()) throw ValidationError("node map covers nodes outside the matched edges");
  const auto root = find(*covered.begin());
  for (auto v : covered) {
    if (find(v) != root) throw ValidationError("matched query edges are not connected");
  }
}

double contextual_score(const Mapping& m, const AssociationTable& query, const AssociationTable& target,
                        const WeightVector& w) {
  double score = 0.0;
  for (const auto& [eq, et] : m.edges) score += edge_similarity(query[eq], target[et], w);
  return score;
}

double contextual_graph_similarity(const Mapping& m, const Graph& q, const Graph& t, const WeightVector& w) {
  validate_mapping(m, q, t);
  double score = 0.0;
  for (const auto& [eq, et] : m.edges) score += edge_similarity(association_vector(q, eq), association_vector(t, et), w);
  return score;
}

double traditional_node_similarity(std::span<const FeatureValue> u, std::span<const FeatureValue> v,
                                   const FeatureSchema& schema) {
  if (u.size() != schema.dimension() || v.size() != schema.dimension()) {
    throw std::invalid_argument("traditional_node_similarity: dimension mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += feature_similarity(u[i], v[i]);
  return total / static_cast<double>(u.size());
}

double traditional_graph_similarity(const Mapping& m, const Graph& q, const Graph& t) {
  validate_mapping(m, q, t);
  double total = 0.0;
  for (const auto& [u, v] : m.nodes) total += traditional_node_similarity(q.features(u), t.features(v), q.schema());
  return total + static_cast<double>(m.edges.size());
}

double mcs_upper_bound(double current_score, std::size_t edges_matched, std::size_t query_edge_count) {
  if (edges_matched > query_edge_count) throw std::invalid_argument("more edges matched than the query has");
  return current_score + static_cast<double>(query_edge_count - edges_matched);
}

double seed_upper_bound(double cs_to_mbr, std::size_t query_edge_count) {
  if (query_edge_count == 0) throw std::invalid_argument("query has no edges");
  return cs_to_mbr + static_cast<double>(query_edge_count - 1);
}

}  // namespace cgq
