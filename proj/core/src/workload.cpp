#include "cgq/workload.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "cgq/error.hpp"

namespace cgq {

FeatureSchema spatial_schema() {
  return FeatureSchema({{"richness", FeatureKind::numeric},
                        {"disturbance", FeatureKind::numeric},
                        {"medicinal", FeatureKind::numeric},
                        {"economic", FeatureKind::numeric},
                        {"forest_type", FeatureKind::categorical}});
}

namespace {

struct Point {
  double x;
  double y;
};

/// Sum of Gaussian bumps plus a floor; smooth over the square.
class Field {
 public:
  Field(std::mt19937_64& rng, double floor) : floor_(floor) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& b : bumps_) b = {unit(rng), unit(rng), 0.5 + 4.0 * unit(rng), 0.08 + 0.2 * unit(rng)};
  }

  double operator()(Point p) const {
    double v = floor_;
    for (const auto& b : bumps_) {
      const double dx = p.x - b[0];
      const double dy = p.y - b[1];
      v += b[2] * std::exp(-(dx * dx + dy * dy) / (2.0 * b[3] * b[3]));
    }
    return v;
  }

 private:
  double floor_;
  std::array<std::array<double, 4>, 6> bumps_{};
};

double rounded(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

Graph spatial_graph(const SpatialGraphSpec& spec) {
  if (spec.nodes < 2 || spec.categories == 0) throw ValidationError("spatial graph needs two nodes and a category");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.15);

  std::vector<Point> points(spec.nodes);
  for (auto& p : points) p = {unit(rng), unit(rng)};
  std::vector<Field> fields;
  for (int f = 0; f < 4; ++f) fields.emplace_back(rng, 0.2);
  std::vector<Point> centres(spec.categories);
  for (auto& c : centres) c = {unit(rng), unit(rng)};

  GraphBuilder builder(spatial_schema(), false);
  for (std::size_t v = 0; v < spec.nodes; ++v) {
    std::vector<FeatureValue> values;
    for (const auto& field : fields) values.emplace_back(rounded(std::max(0.0, field(points[v]) + noise(rng))));
    std::size_t nearest = 0;
    double best = 2.0;
    for (std::size_t c = 0; c < centres.size(); ++c) {
      const double d = std::hypot(points[v].x - centres[c].x, points[v].y - centres[c].y);
      if (d < best) {
        best = d;
        nearest = c;
      }
    }
    // one node in ten ignores its region
    if (unit(rng) < 0.1) nearest = static_cast<std::size_t>(unit(rng) * static_cast<double>(spec.categories));
    values.emplace_back("forest" + std::to_string(std::min(nearest, spec.categories - 1)));
    builder.add_node("p" + std::to_string(v), std::move(values));
  }

  std::vector<std::pair<double, std::pair<NodeId, NodeId>>> pairs;
  pairs.reserve(spec.nodes * (spec.nodes - 1) / 2);
  for (NodeId u = 0; u < spec.nodes; ++u) {
    for (NodeId v = u + 1; v < spec.nodes; ++v) {
      const double dx = points[u].x - points[v].x;
      const double dy = points[u].y - points[v].y;
      pairs.push_back({dx * dx + dy * dy, {u, v}});
    }
  }
  const auto m = std::min(spec.edges, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(m), pairs.end());
  std::sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(m),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t i = 0; i < m; ++i) builder.add_edge(pairs[i].second.first, pairs[i].second.second);
  return std::move(builder).build();
}

Graph grow_query(const Graph& target, std::size_t edges, std::mt19937_64& rng) {
  if (edges == 0) throw ValidationError("query size must be positive");
  if (target.edge_count() == 0) throw ValidationError("target has no edges");
  std::uniform_int_distribution<EdgeId> pick_edge(0, static_cast<EdgeId>(target.edge_count() - 1));
  std::vector<EdgeId> chosen{pick_edge(rng)};
  std::set<EdgeId> in_query(chosen.begin(), chosen.end());
  std::set<NodeId> nodes{target.edge(chosen[0]).src, target.edge(chosen[0]).dst};
  while (chosen.size() < edges) {
    std::vector<EdgeId> frontier;
    for (auto v : nodes) {
      for (auto e : target.incident_edges(v)) {
        if (!in_query.contains(e)) frontier.push_back(e);
      }
    }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    if (frontier.empty()) throw ValidationError("component too small to grow a query of that size");
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const auto e = frontier[pick(rng)];
    chosen.push_back(e);
    in_query.insert(e);
    nodes.insert(target.edge(e).src);
    nodes.insert(target.edge(e).dst);
  }
  GraphBuilder builder(target.schema(), target.directed());
  std::map<NodeId, NodeId> local;
  for (auto v : nodes) {
    auto f = target.features(v);
    local[v] = builder.add_node(target.label(v), {f.begin(), f.end()});
  }
  for (auto e : chosen) builder.add_edge(local[target.edge(e).src], local[target.edge(e).dst]);
  return std::move(builder).build();
}

FeatureSchema mixed_schema() {
  return FeatureSchema({{"level", FeatureKind::numeric},
                        {"colour", FeatureKind::categorical},
                        {"tags", FeatureKind::categorical_set}});
}

std::vector<FeatureValue> random_mixed_features(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> level(0, 4);
  std::uniform_int_distribution<int> three(0, 2);
  std::uniform_int_distribution<int> mask(0, 7);
  static const std::array<std::string, 3> colours{"red", "green", "blue"};
  static const std::array<std::string, 3> tags{"x", "y", "z"};
  SymbolSet set;
  const auto bits = mask(rng);
  for (int b = 0; b < 3; ++b) {
    if (bits & (1 << b)) set.push_back(tags[static_cast<std::size_t>(b)]);
  }
  return {static_cast<double>(level(rng)), colours[static_cast<std::size_t>(three(rng))], std::move(set)};
}

Graph random_graph(std::size_t nodes, std::size_t edges, bool directed, std::mt19937_64& rng) {
  GraphBuilder builder(mixed_schema(), directed);
  for (std::size_t v = 0; v < nodes; ++v) builder.add_node("n" + std::to_string(v), random_mixed_features(rng));
  const auto pairs = nodes * (nodes - (nodes > 0 ? 1 : 0)) / (directed ? 1 : 2);
  edges = std::min(edges, pairs);
  if (nodes < 2) return std::move(builder).build();
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(nodes - 1));
  std::set<std::pair<NodeId, NodeId>> seen;
  while (builder.edge_count() < edges) {
    auto u = pick(rng);
    auto v = pick(rng);
    if (u == v) continue;
    if (!directed && u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    builder.add_edge(u, v);
  }
  return std::move(builder).build();
}

Graph random_connected_graph(std::size_t edges, bool directed, std::mt19937_64& rng) {
  if (edges == 0) throw ValidationError("graph size must be positive");
  GraphBuilder builder(mixed_schema(), directed);
  std::set<std::pair<NodeId, NodeId>> seen;
  auto add_node = [&] { return builder.add_node("q" + std::to_string(builder.node_count()), random_mixed_features(rng)); };
  auto connect = [&](NodeId u, NodeId v) {
    std::uniform_int_distribution<int> coin(0, 1);
    if (directed && coin(rng)) std::swap(u, v);
    auto key = directed ? std::pair(u, v) : std::pair(std::min(u, v), std::max(u, v));
    if (!seen.insert(key).second) return false;
    builder.add_edge(u, v);
    return true;
  };
  connect(add_node(), add_node());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (builder.edge_count() < edges) {
    const auto n = builder.node_count();
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    if (n >= 3 && unit(rng) < 0.3) {
      // close a cycle if the pair is still free
      const auto u = pick(rng);
      const auto v = pick(rng);
      if (u != v) connect(u, v);
      continue;
    }
    connect(pick(rng), add_node());
  }
  return std::move(builder).build();
}

}  // namespace cgq
