#pragma once

// Shared instances and independent reference computations for the test suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cgq/context.hpp"
#include "cgq/graph.hpp"
#include "cgq/similarity.hpp"

namespace cgq::testing {

inline FeatureSchema faculty_schema() {
  return FeatureSchema({{"org", FeatureKind::categorical},
                        {"area", FeatureKind::categorical},
                        {"hindex", FeatureKind::numeric}});
}

/// Three researchers at one institution, pairwise connected.
/// Edge 0 joins a1-a2, edge 1 a1-a3, edge 2 a2-a3.
inline Graph faculty_query() {
  GraphBuilder b(faculty_schema(), false);
  b.add_node("a1", {std::string("west"), std::string("AI"), 112.0});
  b.add_node("a2", {std::string("west"), std::string("ML"), 125.0});
  b.add_node("a3", {std::string("west"), std::string("DB"), 133.0});
  b.add_edge("a1", "a2");
  b.add_edge("a1", "a3");
  b.add_edge("a2", "a3");
  return std::move(b).build();
}

/// The contextual counterpart: same shape, another institution.
/// Edge 0 joins b1-b2, edge 1 b1-b3, edge 2 b3-b2.
inline Graph faculty_target() {
  GraphBuilder b(faculty_schema(), false);
  b.add_node("b1", {std::string("east"), std::string("DB"), 45.0});
  b.add_node("b2", {std::string("east"), std::string("DM"), 43.0});
  b.add_node("b3", {std::string("east"), std::string("DM"), 50.0});
  b.add_edge("b1", "b2");
  b.add_edge("b1", "b3");
  b.add_edge("b3", "b2");
  return std::move(b).build();
}

/// Null model whose "area" table puts 1, 3 and 2 of 100 edges on the three
/// query pairs; the rest sit on an unrelated pair.
inline NullModel area_null_model() {
  std::vector<PairCounts> counts(3);
  counts[0][EdgePairKey(std::string("west"), std::string("west"))] = 100;
  counts[1][EdgePairKey(std::string("AI"), std::string("ML"))] = 1;
  counts[1][EdgePairKey(std::string("AI"), std::string("DB"))] = 3;
  counts[1][EdgePairKey(std::string("DB"), std::string("ML"))] = 2;
  counts[1][EdgePairKey(std::string("OS"), std::string("PL"))] = 94;
  counts[2][EdgePairKey(std::int32_t{0}, std::int32_t{0})] = 100;
  return NullModel(Binner({{}, {}, {}}), std::move(counts), 100);
}

/// Textbook Pearson statistic, written out term by term.
inline double pearson(const std::vector<double>& observed, const std::vector<double>& expected) {
  double total = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    total += std::pow(observed[i] - expected[i], 2) / expected[i];
  }
  return total;
}

inline double ratio(double x, double y) {
  if (x == 0.0 && y == 0.0) return 1.0;
  return std::min(x, y) / std::max(x, y);
}

/// Edge similarity evaluated directly from node features, bypassing the
/// association-vector code.
inline double reference_edge_similarity(const Graph& q, EdgeId eq, const Graph& t, EdgeId et,
                                        const std::vector<double>& w) {
  auto assoc = [](const Graph& g, EdgeId e, std::size_t i) {
    const auto& a = g.feature(g.edge(e).src, i);
    const auto& b = g.feature(g.edge(e).dst, i);
    if (const auto* x = std::get_if<double>(&a)) return ratio(*x, std::get<double>(b));
    return a == b ? 1.0 : 0.0;
  };
  double cs = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) cs += w[i] * ratio(assoc(q, eq, i), assoc(t, et, i));
  return cs;
}

/// Connected maximal common subgraphs found by enumerating every partial
/// injective node map and every connected edge set it supports, then testing
/// maximality directly. Exponential; for graphs of a handful of nodes only.
/// Returns signature -> smallest node map.
inline std::map<std::vector<EdgePair>, std::vector<NodePair>> brute_force_mcs(const Graph& q, const Graph& t) {
  std::map<std::vector<EdgePair>, std::vector<NodePair>> out;
  const auto nq = q.node_count();
  std::vector<NodeId> phi(nq, kNoNode);
  std::vector<bool> used(t.node_count(), false);

  auto target_edge = [&](EdgeId eq) -> std::optional<EdgeId> {
    const auto& a = q.edge(eq);
    if (phi[a.src] == kNoNode || phi[a.dst] == kNoNode) return std::nullopt;
    return t.find_edge(phi[a.src], phi[a.dst]);
  };

  auto consider = [&] {
    std::vector<EdgeId> compatible;
    for (EdgeId e = 0; e < q.edge_count(); ++e) {
      if (target_edge(e)) compatible.push_back(e);
    }
    const auto c = compatible.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << c); ++mask) {
      std::vector<EdgeId> chosen;
      for (std::size_t i = 0; i < c; ++i) {
        if (mask & (std::uint64_t{1} << i)) chosen.push_back(compatible[i]);
      }
      // chosen edges must cover exactly the mapped nodes and be connected
      std::set<NodeId> covered;
      for (auto e : chosen) {
        covered.insert(q.edge(e).src);
        covered.insert(q.edge(e).dst);
      }
      std::size_t mapped = 0;
      for (auto v : phi) mapped += v != kNoNode;
      if (covered.size() != mapped) continue;
      std::set<NodeId> reach{q.edge(chosen[0]).src};
      for (bool grew = true; grew;) {
        grew = false;
        for (auto e : chosen) {
          const auto& a = q.edge(e);
          if (reach.contains(a.src) != reach.contains(a.dst)) {
            reach.insert(a.src);
            reach.insert(a.dst);
            grew = true;
          }
        }
      }
      if (reach.size() != covered.size()) continue;
      // maximal: no compatible edge left out, no edge to a fresh node possible
      bool maximal = chosen.size() == c;
      for (EdgeId e = 0; e < q.edge_count() && maximal; ++e) {
        const auto& a = q.edge(e);
        const bool src_in = phi[a.src] != kNoNode;
        const bool dst_in = phi[a.dst] != kNoNode;
        if (src_in == dst_in) continue;
        const NodeId anchor = src_in ? phi[a.src] : phi[a.dst];
        for (auto et : t.incident_edges(anchor)) {
          const auto& b = t.edge(et);
          NodeId fresh = b.src == anchor ? b.dst : b.src;
          if (q.directed()) {
            if (src_in && b.src != anchor) continue;
            if (dst_in && b.dst != anchor) continue;
          }
          if (!used[fresh]) {
            maximal = false;
            break;
          }
        }
      }
      if (!maximal) continue;
      std::vector<EdgePair> sig;
      for (auto e : chosen) sig.push_back({e, *target_edge(e)});
      std::sort(sig.begin(), sig.end());
      std::vector<NodePair> nodes;
      for (NodeId v = 0; v < nq; ++v) {
        if (phi[v] != kNoNode) nodes.push_back({v, phi[v]});
      }
      auto [it, inserted] = out.try_emplace(sig, nodes);
      if (!inserted && nodes < it->second) it->second = nodes;
    }
  };

  std::function<void(NodeId)> assign = [&](NodeId v) {
    if (v == nq) {
      consider();
      return;
    }
    assign(v + 1);
    for (NodeId x = 0; x < t.node_count(); ++x) {
      if (used[x]) continue;
      used[x] = true;
      phi[v] = x;
      assign(v + 1);
      phi[v] = kNoNode;
      used[x] = false;
    }
  };
  assign(0);
  return out;
}

}  // namespace cgq::testing
