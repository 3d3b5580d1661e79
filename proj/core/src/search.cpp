#include "cgq/search.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "cgq/error.hpp"

namespace cgq {

std::string_view to_string(Scorer s) { return s == Scorer::contextual ? "contextual" : "traditional"; }

Scorer parse_scorer(std::string_view text) {
  if (text == "contextual") return Scorer::contextual;
  if (text == "traditional") return Scorer::traditional;
  throw ValidationError("unknown scorer '" + std::string(text) + "'");
}

void SearchParams::validate() const {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (beam_width == 0) throw ValidationError("beam width must be at least 1");
}

bool RankOrder::operator()(const ScoredMatch& a, const ScoredMatch& b) const {
  if (a.score != b.score) return a.score > b.score;
  if (a.mapping.edges != b.mapping.edges) return a.mapping.edges < b.mapping.edges;
  return a.mapping.nodes < b.mapping.nodes;
}

AnswerSet::AnswerSet(std::size_t k, bool dedup) : k_(k), dedup_(dedup) {
  if (k == 0) throw std::invalid_argument("answer set capacity must be positive");
}

double AnswerSet::least_value() const {
  if (held_.size() < k_) return -std::numeric_limits<double>::infinity();
  return std::prev(held_.end())->score;
}

bool AnswerSet::offer(ScoredMatch match) {
  if (dedup_) {
    // equal signatures carry bit-identical scores, so the probe lands on them
    ScoredMatch probe{Mapping{{}, match.mapping.edges}, match.score, true};
    auto it = held_.lower_bound(probe);
    if (it != held_.end() && it->score == match.score && it->mapping.edges == match.mapping.edges) {
      if (match.mapping.nodes > it->mapping.nodes) return false;
      if (match.mapping.nodes < it->mapping.nodes) {
        held_.erase(it);
        held_.insert(std::move(match));
      }
      return true;
    }
  }
  if (held_.size() < k_) {
    held_.insert(std::move(match));
    return true;
  }
  auto worst = std::prev(held_.end());
  if (!RankOrder{}(match, *worst)) return false;
  held_.erase(worst);
  held_.insert(std::move(match));
  return true;
}

namespace {

/// Growth state: query node -> target node and query edge -> target edge.
struct State {
  std::vector<NodeId> phi;
  std::vector<EdgeId> psi;
  std::size_t matched = 0;
  double score = 0.0;
};

struct Extension {
  EdgeId query_edge;
  EdgeId target_edge;
  NodeId query_node = kNoNode;  // newly mapped node, if any
  NodeId target_node = kNoNode;
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : key) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

using VisitedSet = std::unordered_set<std::vector<std::uint32_t>, KeyHash>;

std::vector<std::uint32_t> state_key(const State& s) {
  std::vector<std::uint32_t> key;
  key.reserve(s.psi.size() + s.phi.size());
  key.insert(key.end(), s.psi.begin(), s.psi.end());
  key.insert(key.end(), s.phi.begin(), s.phi.end());
  return key;
}

bool in_image(const State& s, NodeId t) { return std::find(s.phi.begin(), s.phi.end(), t) != s.phi.end(); }

class Grower {
 public:
  Grower(const Graph& q, const Graph& t, const PairFilter& filter) : q_(q), t_(t), filter_(filter) {}

  std::vector<State> seeds(EdgeId eq, EdgeId et) const {
    std::vector<State> out;
    const auto& a = q_.edge(eq);
    const auto& b = t_.edge(et);
    if (!filter_.allows_edge(eq, et)) return out;
    auto add = [&](NodeId x, NodeId y) {
      if (!filter_.allows_node(a.src, x) || !filter_.allows_node(a.dst, y)) return;
      State s{std::vector<NodeId>(q_.node_count(), kNoNode), std::vector<EdgeId>(q_.edge_count(), kNoEdge), 1, 0.0};
      s.phi[a.src] = x;
      s.phi[a.dst] = y;
      s.psi[eq] = et;
      out.push_back(std::move(s));
    };
    add(b.src, b.dst);
    if (!q_.directed()) add(b.dst, b.src);
    return out;
  }

  std::vector<Extension> extensions(const State& s) const {
    std::vector<Extension> out;
    for (NodeId u = 0; u < s.phi.size(); ++u) {
      const auto tu = s.phi[u];
      if (tu == kNoNode) continue;
      for (auto eq : q_.incident_edges(u)) {
        if (s.psi[eq] != kNoEdge) continue;
        const auto& a = q_.edge(eq);
        const bool u_is_src = a.src == u;
        const NodeId other = u_is_src ? a.dst : a.src;
        if (s.phi[other] != kNoNode) {
          // both ends mapped: emit once, from the source side
          if (!u_is_src) continue;
          auto et = t_.find_edge(s.phi[a.src], s.phi[a.dst]);
          if (et && filter_.allows_edge(eq, *et)) out.push_back({eq, *et});
          continue;
        }
        for (auto et : t_.incident_edges(tu)) {
          const auto& b = t_.edge(et);
          NodeId fresh;
          if (q_.directed()) {
            if (u_is_src ? b.src != tu : b.dst != tu) continue;
            fresh = u_is_src ? b.dst : b.src;
          } else {
            fresh = b.src == tu ? b.dst : b.src;
          }
          if (in_image(s, fresh)) continue;
          if (!filter_.allows_edge(eq, et) || !filter_.allows_node(other, fresh)) continue;
          out.push_back({eq, et, other, fresh});
        }
      }
    }
    return out;
  }

  static State apply(const State& s, const Extension& x) {
    State next = s;
    next.psi[x.query_edge] = x.target_edge;
    if (x.query_node != kNoNode) next.phi[x.query_node] = x.target_node;
    ++next.matched;
    return next;
  }

 private:
  const Graph& q_;
  const Graph& t_;
  const PairFilter& filter_;
};

Mapping to_mapping(const State& s) {
  Mapping m;
  for (NodeId u = 0; u < s.phi.size(); ++u) {
    if (s.phi[u] != kNoNode) m.nodes.push_back({u, s.phi[u]});
  }
  for (EdgeId e = 0; e < s.psi.size(); ++e) {
    if (s.psi[e] != kNoEdge) m.edges.push_back({e, s.psi[e]});
  }
  return m;  // already sorted by construction
}

State to_state(const Mapping& m, const Graph& q) {
  State s{std::vector<NodeId>(q.node_count(), kNoNode), std::vector<EdgeId>(q.edge_count(), kNoEdge),
          m.edges.size(), 0.0};
  for (const auto& [u, v] : m.nodes) s.phi.at(u) = v;
  for (const auto& [a, b] : m.edges) s.psi.at(a) = b;
  return s;
}

void require_compatible(const Graph& q, const Graph& t) {
  if (q.schema() != t.schema()) throw SchemaMismatch("query schema differs from the target schema");
  if (q.directed() != t.directed()) throw SchemaMismatch("query and target disagree on edge direction");
  if (q.edge_count() == 0) throw ValidationError("query graph has no edges");
}

/// Keeps the smallest node map per signature.
void record_maximal(std::map<std::vector<EdgePair>, Mapping>& found, Mapping m) {
  auto [it, inserted] = found.try_emplace(m.edges, m);
  if (!inserted && m.nodes < it->second.nodes) it->second = std::move(m);
}

}  // namespace

std::vector<Mapping> extend(const Mapping& m, const Graph& q, const Graph& t, const PairFilter& filter) {
  validate_mapping(m, q, t);
  if (m.empty()) throw ValidationError("cannot extend an empty mapping");
  Grower grower(q, t, filter);
  const auto s = to_state(m, q);
  std::vector<Mapping> out;
  for (const auto& x : grower.extensions(s)) out.push_back(to_mapping(Grower::apply(s, x)));
  std::sort(out.begin(), out.end(), [](const Mapping& a, const Mapping& b) {
    return std::tie(a.edges, a.nodes) < std::tie(b.edges, b.nodes);
  });
  return out;
}

std::vector<Mapping> seed_mappings(const Graph& q, const Graph& t, EdgeId eq, EdgeId et, const PairFilter& filter) {
  Grower grower(q, t, filter);
  std::vector<Mapping> out;
  for (const auto& s : grower.seeds(eq, et)) out.push_back(to_mapping(s));
  return out;
}

NaiveEnumeration enumerate_mcs_naive(const Graph& q, const Graph& t, const NaiveOptions& options) {
  require_compatible(q, t);
  Grower grower(q, t, options.filter);
  VisitedSet visited;
  std::map<std::vector<EdgePair>, Mapping> found;
  NaiveEnumeration out;
  bool stop = false;

  auto out_of_budget = [&] {
    if (out.states >= options.max_states) return true;
    // the clock is cheap but not free; sample it
    return options.deadline && (out.states & 1023) == 0 && std::chrono::steady_clock::now() >= *options.deadline;
  };

  std::function<void(const State&)> grow = [&](const State& s) {
    if (stop) return;
    if (!visited.insert(state_key(s)).second) return;
    ++out.states;
    if (out_of_budget()) {
      stop = true;
      return;
    }
    const auto exts = grower.extensions(s);
    if (exts.empty()) {
      record_maximal(found, to_mapping(s));
      return;
    }
    for (const auto& x : exts) grow(Grower::apply(s, x));
  };

  for (EdgeId eq = 0; eq < q.edge_count() && !stop; ++eq) {
    for (EdgeId et = 0; et < t.edge_count() && !stop; ++et) {
      for (const auto& s : grower.seeds(eq, et)) grow(s);
    }
  }
  out.complete = !stop;
  out.maximal.reserve(found.size());
  for (auto& [sig, m] : found) out.maximal.push_back(std::move(m));
  return out;
}

NaiveResult naive_topk(const Graph& q, const Graph& t, const WeightVector& w, std::size_t k, Scorer scorer,
                       const NaiveOptions& options) {
  if (k == 0) throw ValidationError("k must be at least 1");
  auto all = enumerate_mcs_naive(q, t, options);
  const auto qtab = association_table(q);
  const auto ttab = association_table(t);
  NaiveResult out;
  out.complete = all.complete;
  out.states = all.states;
  out.matches.reserve(all.maximal.size());
  for (auto& m : all.maximal) {
    const double score = scorer == Scorer::contextual ? contextual_score(m, qtab, ttab, w)
                                                      : traditional_graph_similarity(m, q, t);
    out.matches.push_back({std::move(m), score, true});
  }
  std::sort(out.matches.begin(), out.matches.end(), RankOrder{});
  if (out.matches.size() > k) out.matches.resize(k);
  return out;
}

namespace {

struct QueuedState {
  double bound;
  std::size_t matched;
  std::uint64_t seq;
  State state;
};

/// Highest bound first; ties prefer more matched edges, then earlier discovery.
struct QueueOrder {
  bool operator()(const QueuedState& a, const QueuedState& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.matched != b.matched) return a.matched < b.matched;
    return a.seq > b.seq;
  }
};

struct TreeCandidate {
  double sim;
  std::uint32_t node;
};

struct CandidateOrder {
  bool operator()(const TreeCandidate& a, const TreeCandidate& b) const {
    if (a.sim != b.sim) return a.sim < b.sim;
    return a.node > b.node;
  }
};

/// Shared machinery of the top-k and range searches; they differ only in the
/// pruning threshold and the answer capacity.
class CgqSearch {
 public:
  CgqSearch(const Graph& q, const CgqIndex& index, const WeightVector& w, const PairFilter& filter,
            std::size_t beam_width, bool audit, std::optional<double> range, AnswerSet& answers)
      : q_(q),
        index_(index),
        w_(w),
        grower_(q, index.target(), filter),
        beam_width_(beam_width),
        audit_(audit),
        range_(range),
        answers_(answers),
        qtab_(association_table(q)),
        filter_(filter) {
    const auto& p = index.params();
    for (EdgeId e = 0; e < q.edge_count(); ++e) {
      qsum_.push_back(neighborhood_summary(q, qtab_, e, p.buckets, p.radius));
    }
    const auto& t = index.target();
    global_cap_.assign(q.edge_count(), 0.0);
    for (EdgeId eq = 0; eq < q.edge_count(); ++eq) {
      for (EdgeId et = 0; et < t.edge_count(); ++et) {
        if (filter.allows_edge(eq, et)) {
          global_cap_[eq] = std::max(global_cap_[eq], edge_similarity(qtab_[eq], index.associations()[et], w_));
        }
      }
    }
    node_cap_.assign(2 * q.edge_count() * t.node_count(), -1.0);
  }

  SearchStats run() {
    const auto& tree = index_.tree();
    const auto& root = tree.root();
    const auto m = q_.edge_count();

    // phase 1: query edges by similarity to the root MBR
    std::vector<std::pair<double, EdgeId>> order;
    for (EdgeId e = 0; e < m; ++e) order.emplace_back(mbr_similarity(qtab_[e], w_, root.mbr), e);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });

    for (const auto& [root_sim, eq] : order) {
      if (prune(seed_upper_bound(root_sim, m), PruneKind::query_edge)) break;
      explore_query_edge(eq);
    }
    return std::move(stats_);
  }

 private:
  double threshold() const { return range_ ? *range_ : answers_.least_value(); }

  /// Top-k discards a bound only when it cannot beat the current k-th score;
  /// range discards a bound strictly below r. Both keep a slack for rounding.
  bool prune(double bound, PruneKind kind) {
    const double th = threshold();
    const bool cut = range_ ? bound < th - kPruneSlack : bound <= th - kPruneSlack;
    if (cut) {
      ++stats_.pruned;
      if (audit_) stats_.audit.push_back({kind, bound, th});
    }
    return cut;
  }

  /// Best similarity any target edge touching `tv` can reach for `eq`, with
  /// tv in the role of eq's endpoint `from_src` (source) or not. Cached.
  double node_cap(EdgeId eq, bool from_src, NodeId tv) {
    const auto& t = index_.target();
    auto& slot = node_cap_[(static_cast<std::size_t>(eq) * 2 + (from_src ? 1 : 0)) * t.node_count() + tv];
    if (slot >= 0.0) return slot;
    double best = 0.0;
    for (auto et : t.incident_edges(tv)) {
      const auto& b = t.edge(et);
      if (t.directed() && (from_src ? b.src != tv : b.dst != tv)) continue;
      if (!filter_.allows_edge(eq, et)) continue;
      best = std::max(best, edge_similarity(qtab_[eq], index_.associations()[et], w_));
    }
    slot = best;
    return best;
  }

  /// Score plus, per unmatched query edge, the best similarity still open to
  /// it under the current node map. Never exceeds mcs_upper_bound.
  double state_bound(const State& s) {
    double bound = s.score;
    for (EdgeId eq = 0; eq < s.psi.size(); ++eq) {
      if (s.psi[eq] != kNoEdge) continue;
      const auto& a = q_.edge(eq);
      const auto ts = s.phi[a.src];
      const auto td = s.phi[a.dst];
      if (ts != kNoNode && td != kNoNode) {
        const auto et = index_.target().find_edge(ts, td);
        if (et && filter_.allows_edge(eq, *et)) bound += edge_similarity(qtab_[eq], index_.associations()[*et], w_);
      } else if (ts != kNoNode) {
        bound += node_cap(eq, true, ts);
      } else if (td != kNoNode) {
        bound += node_cap(eq, false, td);
      } else {
        bound += global_cap_[eq];
      }
    }
    return std::min(bound, mcs_upper_bound(s.score, s.matched, s.psi.size()));
  }

  // phase 2: best-first descent; leaves hand out beams of seeds ranked by
  // neighbourhood similarity. The leaf cursor is the per-query-edge record of
  // which target edges are already explored.
  void explore_query_edge(EdgeId eq) {
    const auto& tree = index_.tree();
    const auto m = q_.edge_count();
    std::priority_queue<TreeCandidate, std::vector<TreeCandidate>, CandidateOrder> cands;
    cands.push({mbr_similarity(qtab_[eq], w_, tree.root().mbr), 0});
    while (!cands.empty()) {
      const auto cand = cands.top();
      cands.pop();
      if (prune(seed_upper_bound(cand.sim, m), PruneKind::tree_node)) break;
      ++stats_.tree_nodes_visited;
      const auto& node = tree.node(cand.node);
      if (!node.leaf()) {
        for (auto c : node.children) {
          const double sim = mbr_similarity(qtab_[eq], w_, tree.node(c).mbr);
          if (!prune(seed_upper_bound(sim, m), PruneKind::tree_node)) cands.push({sim, c});
        }
        continue;
      }
      std::vector<std::pair<double, EdgeId>> ranked;
      ranked.reserve(node.entries.size());
      for (auto et : node.entries) {
        ranked.emplace_back(neighborhood_similarity(qsum_[eq], index_.summary(et), w_), et);
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
      });
      for (std::size_t start = 0; start < ranked.size(); start += beam_width_) {
        if (start > 0 && prune(seed_upper_bound(cand.sim, m), PruneKind::tree_node)) break;
        const auto end = std::min(ranked.size(), start + std::min(beam_width_, ranked.size() - start));
        grow_beam(eq, std::span(ranked).subspan(start, end - start));
      }
    }
  }

  // phase 3: grow a beam of seeds through a shared bound-ordered queue
  void grow_beam(EdgeId eq, std::span<const std::pair<double, EdgeId>> beam) {
    ++stats_.leaf_batches;
    const auto& target = index_.associations();
    std::priority_queue<QueuedState, std::vector<QueuedState>, QueueOrder> queue;
    for (const auto& [ns, et] : beam) {
      const double cs = edge_similarity(qtab_[eq], target[et], w_);
      for (auto& s : grower_.seeds(eq, et)) {
        ++stats_.seeds;
        s.score = cs;
        const double bound = state_bound(s);
        if (prune(bound, PruneKind::seed)) continue;
        if (!visited_.insert(state_key(s)).second) continue;
        queue.push({bound, 1, seq_++, std::move(s)});
      }
    }
    while (!queue.empty()) {
      auto top = std::move(const_cast<QueuedState&>(queue.top()));
      queue.pop();
      if (prune(top.bound, PruneKind::state)) continue;
      ++stats_.states_expanded;
      const auto exts = grower_.extensions(top.state);
      if (exts.empty()) {
        accept(top.state);
        continue;
      }
      // children are tried in place on one scratch copy; only survivors are stored
      State& child = top.state;
      const double base = child.score;
      for (const auto& x : exts) {
        child.psi[x.query_edge] = x.target_edge;
        if (x.query_node != kNoNode) child.phi[x.query_node] = x.target_node;
        ++child.matched;
        child.score = base + edge_similarity(qtab_[x.query_edge], target[x.target_edge], w_);
        const double bound = state_bound(child);
        if (!prune(bound, PruneKind::state) && visited_.insert(state_key(child)).second) {
          queue.push({bound, child.matched, seq_++, child});
        }
        child.psi[x.query_edge] = kNoEdge;
        if (x.query_node != kNoNode) child.phi[x.query_node] = kNoNode;
        --child.matched;
      }
    }
  }

  void accept(const State& s) {
    ++stats_.maximal_found;
    auto mapping = to_mapping(s);
    const double score = contextual_score(mapping, qtab_, index_.associations(), w_);
    if (range_ && score < *range_) return;
    answers_.offer({std::move(mapping), score, true});
  }

  const Graph& q_;
  const CgqIndex& index_;
  const WeightVector& w_;
  Grower grower_;
  std::size_t beam_width_;
  bool audit_;
  std::optional<double> range_;
  AnswerSet& answers_;
  AssociationTable qtab_;
  std::vector<NeighborhoodSummary> qsum_;
  const PairFilter& filter_;
  std::vector<double> global_cap_;
  std::vector<double> node_cap_;
  VisitedSet visited_;
  std::uint64_t seq_ = 0;
  SearchStats stats_;
};

void rerank_traditional(std::vector<ScoredMatch>& matches, const Graph& q, const Graph& t) {
  for (auto& m : matches) m.score = traditional_graph_similarity(m.mapping, q, t);
  std::sort(matches.begin(), matches.end(), RankOrder{});
}

}  // namespace

SearchResult cgq_topk(const Graph& q, const CgqIndex& index, const SearchParams& params, const WeightVector& w,
                      const PairFilter& filter) {
  params.validate();
  require_compatible(q, index.target());
  if (w.size() != q.schema().dimension()) throw SchemaMismatch("weight vector dimension differs from the schema");
  AnswerSet answers(params.k, params.dedup);
  CgqSearch search(q, index, w, filter, params.beam_width, params.audit, std::nullopt, answers);
  SearchResult out{{}, w, search.run()};
  out.matches = answers.ranked();
  if (params.scorer == Scorer::traditional) rerank_traditional(out.matches, q, index.target());
  return out;
}

SearchResult cgq_topk(const Graph& q, const CgqIndex& index, const SearchParams& params) {
  require_compatible(q, index.target());
  return cgq_topk(q, index, params, weight_vector(q, index.null_model()), {});
}

SearchResult cgq_range(const Graph& q, const CgqIndex& index, double r, const WeightVector& w,
                       const PairFilter& filter, bool audit) {
  if (!(r >= 0.0)) throw ValidationError("range threshold must be nonnegative");
  require_compatible(q, index.target());
  if (w.size() != q.schema().dimension()) throw SchemaMismatch("weight vector dimension differs from the schema");
  AnswerSet answers(std::numeric_limits<std::size_t>::max(), true);
  CgqSearch search(q, index, w, filter, std::numeric_limits<std::size_t>::max(), audit, r, answers);
  SearchResult out{{}, w, search.run()};
  out.matches = answers.ranked();
  return out;
}

SearchResult cgq_range(const Graph& q, const CgqIndex& index, double r, bool audit) {
  require_compatible(q, index.target());
  return cgq_range(q, index, r, weight_vector(q, index.null_model()), {}, audit);
}

}  // namespace cgq
