#include "cgq/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cgq/error.hpp"

namespace cgq {

bool Mbr::contains(std::span<const double> s) const {
  if (s.size() != lo.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < lo[i] || s[i] > hi[i]) return false;
  }
  return true;
}

bool Mbr::contains(const Mbr& inner) const {
  if (inner.lo.size() != lo.size()) return false;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
  }
  return true;
}

Mbr mbr_of(const std::vector<AssociationVector>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("mbr_of: empty input");
  Mbr box{vectors.front(), vectors.front()};
  for (const auto& s : vectors) {
    if (s.size() != box.dimension()) throw std::invalid_argument("mbr_of: ragged input");
    for (std::size_t i = 0; i < s.size(); ++i) {
      box.lo[i] = std::min(box.lo[i], s[i]);
      box.hi[i] = std::max(box.hi[i], s[i]);
    }
  }
  return box;
}

Mbr mbr_of(const AssociationTable& table, std::span<const EdgeId> edges) {
  if (edges.empty()) throw std::invalid_argument("mbr_of: empty input");
  const auto first = table[edges.front()];
  Mbr box{{first.begin(), first.end()}, {first.begin(), first.end()}};
  for (auto e : edges) {
    const auto s = table[e];
    for (std::size_t i = 0; i < s.size(); ++i) {
      box.lo[i] = std::min(box.lo[i], s[i]);
      box.hi[i] = std::max(box.hi[i], s[i]);
    }
  }
  return box;
}

double mbr_similarity(std::span<const double> query, const WeightVector& w, const Mbr& h) {
  if (query.size() != h.dimension() || query.size() != w.size()) {
    throw std::invalid_argument("mbr_similarity: dimension mismatch");
  }
  double sim = 0.0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    double m = 1.0;
    if (query[i] < h.lo[i]) {
      m = gamma(query[i], h.lo[i]);
    } else if (query[i] > h.hi[i]) {
      m = gamma(query[i], h.hi[i]);
    }
    sim += w[i] * m;
  }
  return sim;
}

std::size_t bucket_of(double value, std::size_t buckets) {
  // the epsilon keeps exact multiples of 1/B in the lower bucket despite rounding
  const double raw = std::ceil(value * static_cast<double>(buckets) - 1e-9);
  if (raw < 1.0) return 1;
  return std::min(buckets, static_cast<std::size_t>(raw));
}

NeighborhoodSummary::NeighborhoodSummary(std::size_t dimension, std::size_t buckets)
    : dimension_(dimension), buckets_(buckets), counts_(dimension * buckets, 0) {
  if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
}

NeighborhoodSummary neighborhood_summary(const Graph& g, const AssociationTable& table, EdgeId e,
                                         std::size_t buckets, std::size_t radius) {
  NeighborhoodSummary out(table.dimension(), buckets);
  for (auto n : neighborhood_edges(g, e, radius)) {
    const auto s = table[n];
    for (std::size_t i = 0; i < s.size(); ++i) out.add(i, bucket_of(s[i], buckets));
  }
  return out;
}

NeighborhoodSummary neighborhood_summary(const Graph& g, EdgeId e, std::size_t buckets, std::size_t radius) {
  return neighborhood_summary(g, association_table(g), e, buckets, radius);
}

double neighborhood_similarity(const NeighborhoodSummary& query, const NeighborhoodSummary& target,
                               const WeightVector& w) {
  if (query.dimension() != target.dimension() || query.buckets() != target.buckets() ||
      query.dimension() != w.size()) {
    throw std::invalid_argument("neighborhood_similarity: shape mismatch");
  }
  double ns = 0.0;
  for (std::size_t i = 0; i < query.dimension(); ++i) {
    std::size_t nonzero = 0;
    std::size_t dominated = 0;
    for (std::size_t j = 1; j <= query.buckets(); ++j) {
      const auto c = query.count(i, j);
      if (c == 0) continue;
      ++nonzero;
      if (c <= target.count(i, j)) ++dominated;
    }
    const double ns_i = nonzero == 0 ? 1.0 : static_cast<double>(dominated) / static_cast<double>(nonzero);
    ns += w[i] * ns_i;
  }
  return ns;
}

void IndexParams::validate() const {
  if (branching < 2) throw ValidationError("branching factor must be at least 2");
  if (leaf_threshold < 1) throw ValidationError("leaf threshold must be at least 1");
  if (buckets < 1) throw ValidationError("bucket count must be at least 1");
  if (radius < 1) throw ValidationError("neighbourhood radius must be at least 1");
  if (bins < 1) throw ValidationError("continuous bin count must be at least 1");
}

CgqTree::CgqTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  for (const auto& n : nodes_) {
    for (auto c : n.children) {
      if (c >= nodes_.size()) throw std::invalid_argument("tree child index out of range");
    }
  }
}

std::size_t CgqTree::height() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth(nodes_.size(), 1);
  std::size_t h = 1;
  // pre-order: parents precede children
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (auto c : nodes_[i].children) depth[c] = depth[i] + 1;
    h = std::max(h, depth[i]);
  }
  return h;
}

std::size_t CgqTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.leaf(); }));
}

namespace {

bool all_identical(const AssociationTable& table, std::span<const EdgeId> edges) {
  const auto first = table[edges.front()];
  return std::all_of(edges.begin(), edges.end(), [&](EdgeId e) {
    const auto s = table[e];
    return std::equal(s.begin(), s.end(), first.begin());
  });
}

std::size_t max_variance_dimension(const AssociationTable& table, std::span<const EdgeId> edges) {
  const auto m = static_cast<double>(edges.size());
  std::size_t best = 0;
  double best_var = -1.0;
  for (std::size_t i = 0; i < table.dimension(); ++i) {
    double mean = 0.0;
    for (auto e : edges) mean += table[e][i];
    mean /= m;
    double var = 0.0;
    for (auto e : edges) var += (table[e][i] - mean) * (table[e][i] - mean);
    if (var > best_var) {
      best_var = var;
      best = i;
    }
  }
  return best;
}

void build_subtree(const AssociationTable& table, std::vector<EdgeId> edges, std::size_t branching,
                   std::size_t leaf_threshold, std::vector<TreeNode>& out) {
  const auto self = out.size();
  out.push_back({mbr_of(table, edges), {}, {}});
  if (edges.size() < leaf_threshold || all_identical(table, edges)) {
    std::sort(edges.begin(), edges.end());
    out[self].entries = std::move(edges);
    return;
  }
  const auto dim = max_variance_dimension(table, edges);
  std::sort(edges.begin(), edges.end(), [&](EdgeId a, EdgeId b) {
    const double va = table[a][dim];
    const double vb = table[b][dim];
    return va < vb || (va == vb && a < b);
  });
  const auto m = edges.size();
  const auto children = std::min(branching, m);
  const auto per_child = m / children;
  std::size_t start = 0;
  for (std::size_t c = 0; c < children; ++c) {
    const auto end = c + 1 == children ? m : start + per_child;
    const auto child = static_cast<std::uint32_t>(out.size());
    out[self].children.push_back(child);
    build_subtree(table, std::vector<EdgeId>(edges.begin() + static_cast<std::ptrdiff_t>(start),
                                             edges.begin() + static_cast<std::ptrdiff_t>(end)),
                  branching, leaf_threshold, out);
    start = end;
  }
}

}  // namespace

CgqTree construct_tree(const AssociationTable& table, std::vector<EdgeId> edges, std::size_t branching,
                       std::size_t leaf_threshold) {
  if (branching < 2) throw std::invalid_argument("branching factor must be at least 2");
  if (leaf_threshold < 1) throw std::invalid_argument("leaf threshold must be at least 1");
  if (edges.empty()) throw std::invalid_argument("cannot build a tree over no edges");
  std::vector<TreeNode> nodes;
  build_subtree(table, std::move(edges), branching, leaf_threshold, nodes);
  return CgqTree(std::move(nodes));
}

CgqIndex::CgqIndex(Graph target, IndexParams params, NullModel null_model, AssociationTable associations,
                   std::vector<NeighborhoodSummary> summaries, CgqTree tree)
    : target_(std::move(target)),
      params_(params),
      null_model_(std::move(null_model)),
      associations_(std::move(associations)),
      summaries_(std::move(summaries)),
      tree_(std::move(tree)) {
  if (associations_.size() != target_.edge_count() || summaries_.size() != target_.edge_count()) {
    throw std::invalid_argument("index tables do not match the target edge count");
  }
}

CgqIndex build_index(Graph target, const IndexParams& params) {
  params.validate();
  if (target.edge_count() == 0) throw ValidationError("target graph has no edges");
  auto nm = estimate_null_model(target, fit_binner(target, params.bins));
  auto table = association_table(target);
  std::vector<NeighborhoodSummary> summaries;
  summaries.reserve(target.edge_count());
  for (EdgeId e = 0; e < target.edge_count(); ++e) {
    summaries.push_back(neighborhood_summary(target, table, e, params.buckets, params.radius));
  }
  std::vector<EdgeId> edges(target.edge_count());
  std::iota(edges.begin(), edges.end(), EdgeId{0});
  auto tree = construct_tree(table, std::move(edges), params.branching, params.leaf_threshold);
  return CgqIndex(std::move(target), params, std::move(nm), std::move(table), std::move(summaries), std::move(tree));
}

// ---- persistence ----

namespace {

constexpr char kMagic[4] = {'C', 'G', 'Q', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void size(std::size_t v) { u64(static_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    size(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void doubles(const std::vector<double>& v) {
    size(v.size());
    for (auto x : v) f64(x);
  }
  template <typename T>
  void u32s(const std::vector<T>& v) {
    size(v.size());
    for (auto x : v) u32(static_cast<std::uint32_t>(x));
  }

 private:
  template <typename T>
  void le(T v) {
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, sizeof(T));
  }

  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() {
    char c = 0;
    read(&c, 1);
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  /// Element counts are checked against a sanity limit so a corrupt length
  /// fails as truncation instead of a huge allocation.
  std::size_t size() {
    const auto v = u64();
    if (v > (std::uint64_t{1} << 34)) throw FormatError("index file is corrupt: implausible length");
    return static_cast<std::size_t>(v);
  }
  std::string str() {
    std::string s(size(), '\0');
    read(s.data(), s.size());
    return s;
  }
  std::vector<double> doubles() {
    std::vector<double> v(size());
    for (auto& x : v) x = f64();
    return v;
  }
  template <typename T>
  std::vector<T> u32s() {
    std::vector<T> v(size());
    for (auto& x : v) x = static_cast<T>(u32());
    return v;
  }

  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("index file is truncated");
  }

 private:
  template <typename T>
  T le() {
    unsigned char buf[sizeof(T)];
    read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  std::istream& in_;
};

enum : std::uint8_t { kTagNumber = 0, kTagSymbol = 1, kTagSet = 2 };

void write_value(Writer& w, const FeatureValue& value) {
  if (const auto* x = std::get_if<double>(&value)) {
    w.u8(kTagNumber);
    w.f64(*x);
  } else if (const auto* s = std::get_if<std::string>(&value)) {
    w.u8(kTagSymbol);
    w.str(*s);
  } else {
    const auto& set = std::get<SymbolSet>(value);
    w.u8(kTagSet);
    w.size(set.size());
    for (const auto& s : set) w.str(s);
  }
}

FeatureValue read_value(Reader& r) {
  switch (r.u8()) {
    case kTagNumber:
      return r.f64();
    case kTagSymbol:
      return r.str();
    case kTagSet: {
      SymbolSet set(r.size());
      for (auto& s : set) s = r.str();
      return set;
    }
    default:
      throw FormatError("index file is corrupt: unknown value tag");
  }
}

void write_discrete(Writer& w, const DiscreteValue& v) {
  if (const auto* bin = std::get_if<std::int32_t>(&v)) {
    w.u8(kTagNumber);
    w.u32(static_cast<std::uint32_t>(*bin));
  } else {
    w.u8(kTagSymbol);
    w.str(std::get<std::string>(v));
  }
}

DiscreteValue read_discrete(Reader& r) {
  switch (r.u8()) {
    case kTagNumber:
      return static_cast<std::int32_t>(r.u32());
    case kTagSymbol:
      return r.str();
    default:
      throw FormatError("index file is corrupt: unknown key tag");
  }
}

void write_graph_section(Writer& w, const Graph& g) {
  w.u8(g.directed() ? 1 : 0);
  const auto& schema = g.schema();
  w.size(schema.dimension());
  for (const auto& f : schema.features()) {
    w.str(f.name);
    w.u8(static_cast<std::uint8_t>(f.kind));
  }
  w.size(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    w.str(g.label(v));
    for (const auto& value : g.features(v)) write_value(w, value);
  }
  w.size(g.edge_count());
  for (const auto& e : g.edges()) {
    w.u32(e.src);
    w.u32(e.dst);
  }
}

Graph read_graph_section(Reader& r) {
  const bool directed = r.u8() != 0;
  std::vector<FeatureSpec> specs(r.size());
  for (auto& f : specs) {
    f.name = r.str();
    const auto kind = r.u8();
    if (kind > static_cast<std::uint8_t>(FeatureKind::categorical_set)) {
      throw FormatError("index file is corrupt: unknown feature kind");
    }
    f.kind = static_cast<FeatureKind>(kind);
  }
  const auto d = specs.size();
  GraphBuilder builder(FeatureSchema(std::move(specs)), directed);
  const auto nodes = r.size();
  for (std::size_t v = 0; v < nodes; ++v) {
    auto label = r.str();
    std::vector<FeatureValue> values(d);
    for (auto& value : values) value = read_value(r);
    builder.add_node(std::move(label), std::move(values));
  }
  const auto edges = r.size();
  for (std::size_t e = 0; e < edges; ++e) {
    const auto src = r.u32();
    const auto dst = r.u32();
    builder.add_edge(src, dst);
  }
  return std::move(builder).build();
}

void write_null_model(Writer& w, const NullModel& nm) {
  const auto& cuts = nm.binner().cuts();
  w.size(cuts.size());
  for (const auto& c : cuts) w.doubles(c);
  w.u64(nm.edge_count());
  w.size(nm.dimension());
  for (std::size_t i = 0; i < nm.dimension(); ++i) {
    const auto& table = nm.counts(i);
    w.size(table.size());
    for (const auto& [key, n] : table) {
      write_discrete(w, key.first());
      write_discrete(w, key.second());
      w.u64(n);
    }
  }
}

NullModel read_null_model(Reader& r) {
  std::vector<std::vector<double>> cuts(r.size());
  for (auto& c : cuts) c = r.doubles();
  const auto edge_count = r.u64();
  std::vector<PairCounts> counts(r.size());
  for (auto& table : counts) {
    const auto n = r.size();
    for (std::size_t k = 0; k < n; ++k) {
      auto a = read_discrete(r);
      auto b = read_discrete(r);
      table[EdgePairKey(std::move(a), std::move(b))] = r.u64();
    }
  }
  return NullModel(Binner(std::move(cuts)), std::move(counts), edge_count);
}

}  // namespace

void write_index(std::ostream& out, const CgqIndex& index) {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.u32(kVersion);
  write_graph_section(w, index.target());
  const auto& p = index.params();
  for (auto v : {p.branching, p.leaf_threshold, p.buckets, p.radius, p.bins}) w.size(v);
  write_null_model(w, index.null_model());
  w.size(index.associations().dimension());
  w.doubles(index.associations().values());
  w.size(index.summaries().size());
  for (const auto& s : index.summaries()) {
    w.size(s.dimension());
    w.size(s.buckets());
    w.u32s(s.counts());
  }
  const auto& nodes = index.tree().nodes();
  w.size(nodes.size());
  for (const auto& n : nodes) {
    w.doubles(n.mbr.lo);
    w.doubles(n.mbr.hi);
    w.u32s(n.children);
    w.u32s(n.entries);
  }
  if (!out) throw Error("failed to write index");
}

CgqIndex read_index(std::istream& in) {
  Reader r(in);
  char magic[sizeof kMagic];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw FormatError("not an index file (bad magic)");
  const auto version = r.u32();
  if (version != kVersion) throw FormatError("unsupported index version " + std::to_string(version));
  try {
    auto graph = read_graph_section(r);
    IndexParams p;
    for (auto* v : {&p.branching, &p.leaf_threshold, &p.buckets, &p.radius, &p.bins}) *v = r.size();
    p.validate();
    auto nm = read_null_model(r);
    const auto dim = r.size();
    AssociationTable table(dim, r.doubles());
    std::vector<NeighborhoodSummary> summaries(r.size());
    for (auto& s : summaries) {
      const auto d = r.size();
      const auto b = r.size();
      s = NeighborhoodSummary(d, b);
      s.counts() = r.u32s<std::uint32_t>();
      if (s.counts().size() != d * b) throw FormatError("index file is corrupt: summary shape");
    }
    std::vector<TreeNode> nodes(r.size());
    for (auto& n : nodes) {
      n.mbr.lo = r.doubles();
      n.mbr.hi = r.doubles();
      n.children = r.u32s<std::uint32_t>();
      n.entries = r.u32s<EdgeId>();
    }
    return CgqIndex(std::move(graph), p, std::move(nm), std::move(table), std::move(summaries),
                    CgqTree(std::move(nodes)));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("index file is corrupt: ") + e.what());
  }
}

void save_index(const CgqIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_index(out, index);
}

CgqIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_index(in);
}

}  // namespace cgq
