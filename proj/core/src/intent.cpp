#include "cgq/intent.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <set>

#include "cgq/error.hpp"

namespace cgq {

std::string_view to_string(WeightMode m) { return m == WeightMode::individual ? "individual" : "averaged"; }
std::string_view to_string(AggMode m) { return m == AggMode::min ? "min" : "mean"; }

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "individual") return WeightMode::individual;
  if (text == "averaged") return WeightMode::averaged;
  throw ValidationError("unknown weight mode '" + std::string(text) + "'");
}

AggMode parse_agg_mode(std::string_view text) {
  if (text == "min") return AggMode::min;
  if (text == "mean") return AggMode::mean;
  throw ValidationError("unknown aggregation mode '" + std::string(text) + "'");
}

std::vector<BijectionEntry> read_bijections(std::istream& in, const std::string& source) {
  std::vector<BijectionEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (auto pos = line.find('\t'); pos != std::string::npos; pos = line.find('\t', start)) {
      cells.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    cells.push_back(line.substr(start));
    if (cells.size() != 4) throw ParseError(source, line_no, "expected 4 tab-separated columns");
    BijectionEntry entry;
    try {
      std::size_t used = 0;
      entry.exemplar_i = std::stoul(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing");
      entry.exemplar_j = std::stoul(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "exemplar index must be a nonnegative integer");
    }
    entry.node_i = cells[2];
    entry.node_j = cells[3];
    out.push_back(std::move(entry));
  }
  return out;
}

ExemplarSet::ExemplarSet(std::vector<Graph> exemplars, std::vector<std::vector<NodeId>> from_first,
                         WeightMode weight_mode, AggMode agg_mode)
    : exemplars_(std::move(exemplars)),
      node_maps_(std::move(from_first)),
      weight_mode_(weight_mode),
      agg_mode_(agg_mode) {
  if (exemplars_.size() < 2) throw ValidationError("an exemplar set needs at least two graphs");
  if (node_maps_.size() != exemplars_.size()) throw ValidationError("one bijection per exemplar is required");
  const auto& g0 = exemplars_.front();
  for (std::size_t j = 0; j < exemplars_.size(); ++j) {
    const auto& gj = exemplars_[j];
    const auto& phi = node_maps_[j];
    const auto tag = "exemplar " + std::to_string(j) + ": ";
    if (gj.schema() != g0.schema() || gj.directed() != g0.directed()) {
      throw SchemaMismatch(tag + "schema or direction differs from exemplar 0");
    }
    if (gj.node_count() != g0.node_count() || gj.edge_count() != g0.edge_count() || phi.size() != g0.node_count()) {
      throw ValidationError(tag + "not the same size as exemplar 0");
    }
    std::vector<bool> hit(gj.node_count(), false);
    for (NodeId v = 0; v < phi.size(); ++v) {
      if (phi[v] >= gj.node_count() || hit[phi[v]]) throw ValidationError(tag + "node map is not a bijection");
      hit[phi[v]] = true;
      if (j == 0 && phi[v] != v) throw ValidationError("exemplar 0 must map to itself");
    }
    std::vector<EdgeId> edges(g0.edge_count());
    for (EdgeId e = 0; e < g0.edge_count(); ++e) {
      const auto& a = g0.edge(e);
      auto mapped = gj.find_edge(phi[a.src], phi[a.dst]);
      if (!mapped) throw ValidationError(tag + "bijection does not preserve edges");
      edges[e] = *mapped;
    }
    edge_maps_.push_back(std::move(edges));
  }
}

ExemplarSet ExemplarSet::from_entries(std::vector<Graph> exemplars, const std::vector<BijectionEntry>& entries,
                                      WeightMode weight_mode, AggMode agg_mode) {
  const auto u = exemplars.size();
  if (u < 2) throw ValidationError("an exemplar set needs at least two graphs");
  const auto n = exemplars.front().node_count();
  auto resolve = [&](std::size_t j, const std::string& label) {
    if (j >= u) throw ValidationError("bijection refers to exemplar " + std::to_string(j) + " of " + std::to_string(u));
    auto v = exemplars[j].find_node(label);
    if (!v) throw ValidationError("bijection node '" + label + "' not in exemplar " + std::to_string(j));
    return *v;
  };
  // pairs (i, j) with j -> node in exemplar j for each node in exemplar i
  std::map<std::pair<std::size_t, std::size_t>, std::vector<NodeId>> pairwise;
  for (const auto& e : entries) {
    auto [i, j] = std::pair(e.exemplar_i, e.exemplar_j);
    auto a = resolve(i, e.node_i);
    auto b = resolve(j, e.node_j);
    if (i == j) throw ValidationError("bijection maps an exemplar onto itself");
    if (i > j) {
      std::swap(i, j);
      std::swap(a, b);
    }
    auto& map = pairwise.try_emplace({i, j}, std::vector<NodeId>(n, kNoNode)).first->second;
    if (a >= map.size() || map[a] != kNoNode) throw ValidationError("bijection lists a node twice");
    map[a] = b;
  }
  std::vector<std::vector<NodeId>> from_first(u);
  from_first[0].resize(n);
  std::iota(from_first[0].begin(), from_first[0].end(), NodeId{0});
  for (std::size_t j = 1; j < u; ++j) {
    auto it = pairwise.find({0, j});
    if (it == pairwise.end()) throw ValidationError("missing bijection between exemplar 0 and " + std::to_string(j));
    if (std::count(it->second.begin(), it->second.end(), kNoNode) > 0) {
      throw ValidationError("bijection between exemplar 0 and " + std::to_string(j) + " is partial");
    }
    from_first[j] = it->second;
  }
  // phi_ij must equal phi_0j o phi_0i^-1
  for (const auto& [key, map] : pairwise) {
    const auto [i, j] = key;
    if (i == 0) continue;
    std::vector<NodeId> inverse_i(n, kNoNode);
    for (NodeId v = 0; v < n; ++v) {
      if (from_first[i][v] < n) inverse_i[from_first[i][v]] = v;
    }
    for (NodeId a = 0; a < n; ++a) {
      if (map[a] == kNoNode) continue;
      if (inverse_i[a] == kNoNode || from_first[j][inverse_i[a]] != map[a]) {
        throw ValidationError("bijections between exemplars " + std::to_string(i) + " and " + std::to_string(j) +
                              " are inconsistent with exemplar 0");
      }
    }
  }
  return ExemplarSet(std::move(exemplars), std::move(from_first), weight_mode, agg_mode);
}

WeightVector average_weights(const std::vector<WeightVector>& ws) {
  if (ws.empty()) throw std::invalid_argument("no weight vectors to average");
  WeightVector out{std::vector<double>(ws.front().size(), 0.0)};
  for (const auto& w : ws) {
    if (w.size() != out.size()) throw std::invalid_argument("weight vectors differ in dimension");
    for (std::size_t i = 0; i < w.size(); ++i) out.w[i] += w[i];
  }
  for (auto& x : out.w) x /= static_cast<double>(ws.size());
  return out;
}

std::vector<WeightVector> exemplar_weights(const ExemplarSet& es, const NullModel& nm) {
  std::vector<WeightVector> ws;
  for (std::size_t j = 0; j < es.size(); ++j) ws.push_back(weight_vector(es.exemplar(j), nm));
  if (es.weight_mode() == WeightMode::averaged) return {average_weights(ws)};
  return ws;
}

Mapping map_through(const ExemplarSet& es, std::size_t j, const Mapping& m) {
  Mapping out;
  for (const auto& [u, v] : m.nodes) out.nodes.push_back({es.node_in(j, u), v});
  for (const auto& [a, b] : m.edges) out.edges.push_back({es.edge_in(j, a), b});
  out.canonicalize();
  return out;
}

ExemplarScore exemplar_similarity(const Mapping& m, const ExemplarSet& es, const Graph& target, const NullModel& nm) {
  const auto ws = exemplar_weights(es, nm);
  ExemplarScore out;
  for (std::size_t j = 0; j < es.size(); ++j) {
    const auto& w = ws.size() == 1 ? ws.front() : ws[j];
    out.per_exemplar.push_back(contextual_graph_similarity(map_through(es, j, m), es.exemplar(j), target, w));
  }
  if (es.agg_mode() == AggMode::min) {
    out.aggregate = *std::min_element(out.per_exemplar.begin(), out.per_exemplar.end());
  } else {
    out.aggregate = std::accumulate(out.per_exemplar.begin(), out.per_exemplar.end(), 0.0) /
                    static_cast<double>(out.per_exemplar.size());
  }
  return out;
}

std::vector<std::size_t> detect_exact_match_features(const ExemplarSet& es) {
  const auto& g0 = es.first();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g0.schema().dimension(); ++i) {
    bool exact = true;
    for (std::size_t j = 1; j < es.size() && exact; ++j) {
      for (NodeId v = 0; v < g0.node_count() && exact; ++v) {
        exact = g0.feature(v, i) == es.exemplar(j).feature(es.node_in(j, v), i);
      }
    }
    if (exact) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> detect_exact_relation_features(const ExemplarSet& es) {
  const auto& g0 = es.first();
  std::vector<AssociationTable> tables;
  for (std::size_t j = 0; j < es.size(); ++j) tables.push_back(association_table(es.exemplar(j)));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g0.schema().dimension(); ++i) {
    bool exact = true;
    for (std::size_t j = 1; j < es.size() && exact; ++j) {
      for (EdgeId e = 0; e < g0.edge_count() && exact; ++e) exact = tables[0][e][i] == tables[j][es.edge_in(j, e)][i];
    }
    if (exact) out.push_back(i);
  }
  return out;
}

HybridContext hybrid_context(const ExemplarSet& es, const NullModel& nm) {
  HybridContext ctx;
  ctx.exact_match = detect_exact_match_features(es);
  ctx.exact_relation = detect_exact_relation_features(es);
  const auto d = es.first().schema().dimension();
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::binary_search(ctx.exact_relation.begin(), ctx.exact_relation.end(), i)) ctx.free.push_back(i);
  }
  ctx.weights.w.assign(d, 0.0);
  if (ctx.free.empty()) {
    ctx.all_constraint = true;
    std::fill(ctx.weights.w.begin(), ctx.weights.w.end(), 1.0 / static_cast<double>(d));
    return ctx;
  }
  std::vector<double> summed(ctx.free.size(), 0.0);
  for (std::size_t j = 0; j < es.size(); ++j) {
    std::vector<double> x2;
    for (auto i : ctx.free) x2.push_back(chi_square(es.exemplar(j), i, nm));
    auto w = normalize_weights(x2).w;
    for (std::size_t c = 0; c < w.size(); ++c) summed[c] += w[c];
    ctx.per_exemplar.push_back(std::move(w));
  }
  const double total = std::accumulate(summed.begin(), summed.end(), 0.0);
  for (std::size_t c = 0; c < ctx.free.size(); ++c) ctx.weights.w[ctx.free[c]] = summed[c] / total;
  return ctx;
}

PairFilter hybrid_filter(const HybridContext& ctx, const ExemplarSet& es, const CgqIndex& index) {
  PairFilter filter;
  const auto& target = index.target();
  if (!ctx.exact_match.empty()) {
    filter.node = [&es, &target, features = ctx.exact_match](NodeId qv, NodeId tv) {
      for (auto i : features) {
        if (es.first().feature(qv, i) != target.feature(tv, i)) return false;
      }
      return true;
    };
  }
  if (!ctx.exact_relation.empty()) {
    filter.edge = [qtab = association_table(es.first()), &ttab = index.associations(),
                   features = ctx.exact_relation](EdgeId qe, EdgeId te) {
      for (auto i : features) {
        if (qtab[qe][i] != ttab[te][i]) return false;
      }
      return true;
    };
  }
  return filter;
}

SearchResult intent_topk(const ExemplarSet& es, const CgqIndex& index, const SearchParams& params,
                         const HybridContext& ctx) {
  return cgq_topk(es.first(), index, params, ctx.weights, hybrid_filter(ctx, es, index));
}

}  // namespace cgq
