#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "cgq/error.hpp"
#include "cgq/index.hpp"
#include "cgq/workload.hpp"
#include "fixtures.hpp"

namespace cgq {
namespace {

TEST(Mbr, SimilarityCases) {
  const Mbr h{{0.2, 0.0}, {0.6, 0.5}};
  const WeightVector w{{0.5, 0.5}};
  // inside on both dimensions
  EXPECT_DOUBLE_EQ(mbr_similarity(std::vector<double>{0.4, 0.3}, w, h), 1.0);
  // below lo on the first, above hi on the second
  EXPECT_DOUBLE_EQ(mbr_similarity(std::vector<double>{0.1, 1.0}, w, h), 0.5 * 0.5 + 0.5 * 0.5);
  // zero query against a box touching zero
  EXPECT_DOUBLE_EQ(mbr_similarity(std::vector<double>{0.8, 0.0}, w, h), 0.5 * 0.75 + 0.5);
  // zero query against a box away from zero
  const Mbr far{{0.3}, {0.9}};
  EXPECT_DOUBLE_EQ(mbr_similarity(std::vector<double>{0.0}, WeightVector{{1}}, far), 0.0);
}

TEST(Mbr, OfVectors) {
  auto h = mbr_of({{0.1, 0.9}, {0.5, 0.2}, {0.3, 0.4}});
  EXPECT_EQ(h.lo, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(h.hi, (std::vector<double>{0.5, 0.9}));
  EXPECT_TRUE(h.contains(std::vector<double>{0.3, 0.4}));
  EXPECT_FALSE(h.contains(std::vector<double>{0.6, 0.4}));
  EXPECT_THROW(mbr_of({}), std::invalid_argument);
  EXPECT_THROW(mbr_of({{0.1}, {0.1, 0.2}}), std::invalid_argument);
}

TEST(Mbr, BoundDominatesEveryContainedPoint) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  auto coord = [&] { return u(rng) < 0.15 ? 0.0 : (u(rng) < 0.1 ? 1.0 : u(rng)); };
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 5);
    std::vector<AssociationVector> pts(1 + static_cast<std::size_t>(u(rng) * 6));
    for (auto& p : pts) {
      p.resize(d);
      for (auto& x : p) x = coord();
    }
    const auto h = mbr_of(pts);
    std::vector<double> q(d);
    std::vector<double> raw(d);
    for (std::size_t i = 0; i < d; ++i) {
      q[i] = coord();
      raw[i] = u(rng);
    }
    const auto w = normalize_weights(raw);
    const double bound = mbr_similarity(q, w, h);
    for (const auto& p : pts) EXPECT_GE(bound + 1e-12, edge_similarity(q, p, w));
    // a random point of the box, not just the generators
    std::vector<double> inner(d);
    for (std::size_t i = 0; i < d; ++i) inner[i] = h.lo[i] + u(rng) * (h.hi[i] - h.lo[i]);
    EXPECT_GE(bound + 1e-12, edge_similarity(q, inner, w));
  }
}

TEST(Buckets, Boundaries) {
  EXPECT_EQ(bucket_of(0.0, 10), 1u);
  EXPECT_EQ(bucket_of(0.05, 10), 1u);
  EXPECT_EQ(bucket_of(0.1, 10), 1u);
  EXPECT_EQ(bucket_of(0.3, 10), 3u);
  EXPECT_EQ(bucket_of(0.86, 10), 9u);
  EXPECT_EQ(bucket_of(0.9, 10), 9u);
  EXPECT_EQ(bucket_of(0.95, 10), 10u);
  EXPECT_EQ(bucket_of(1.0, 10), 10u);
  EXPECT_EQ(bucket_of(0.5, 1), 1u);
}

TEST(NeighborhoodSummary, FacultyTarget) {
  auto t = testing::faculty_target();
  // edge 1 (b1-b3) neighbours: edge 0 with h ratio 43/45, edge 2 with 43/50
  auto s = neighborhood_summary(t, 1);
  EXPECT_EQ(s.count(0, 10), 2u);
  EXPECT_EQ(s.count(1, 1), 1u);
  EXPECT_EQ(s.count(1, 10), 1u);
  EXPECT_EQ(s.count(2, 9), 1u);
  EXPECT_EQ(s.count(2, 10), 1u);
  std::uint32_t total = 0;
  for (auto c : s.counts()) total += c;
  EXPECT_EQ(total, 2u * 3u);
}

TEST(NeighborhoodSummary, PerFeatureCountsEqualNeighbourCount) {
  std::mt19937_64 rng(5);
  auto g = random_graph(30, 80, false, rng);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto s = neighborhood_summary(g, e);
    const auto n = adjacent_edges(g, e).size();
    for (std::size_t i = 0; i < s.dimension(); ++i) {
      std::size_t row = 0;
      for (std::size_t j = 1; j <= s.buckets(); ++j) row += s.count(i, j);
      EXPECT_EQ(row, n);
    }
  }
}

NeighborhoodSummary summary_of(std::vector<std::vector<std::uint32_t>> rows) {
  NeighborhoodSummary s(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      for (std::uint32_t c = 0; c < rows[i][j]; ++c) s.add(i, j + 1);
    }
  }
  return s;
}

TEST(NeighborhoodSimilarity, Cases) {
  const WeightVector w{{0.5, 0.5}};
  const auto q = summary_of({{2, 0, 1}, {0, 0, 0}});
  // first feature: bucket 1 dominated, bucket 3 not; second has no nonzero buckets
  const auto t = summary_of({{3, 5, 0}, {0, 0, 0}});
  EXPECT_DOUBLE_EQ(neighborhood_similarity(q, t, w), 0.5 * 0.5 + 0.5 * 1.0);
  EXPECT_DOUBLE_EQ(neighborhood_similarity(q, q, w), 1.0);
  const auto none = summary_of({{0, 0, 0}, {0, 0, 0}});
  EXPECT_DOUBLE_EQ(neighborhood_similarity(q, none, w), 0.5);
  EXPECT_THROW(neighborhood_similarity(q, summary_of({{1, 1}, {1, 1}}), w), std::invalid_argument);
}

void check_tree(const CgqTree& tree, const AssociationTable& table, std::size_t edge_count, std::size_t b,
                std::size_t n) {
  std::multiset<EdgeId> seen;
  for (const auto& node : tree.nodes()) {
    if (node.leaf()) {
      ASSERT_FALSE(node.entries.empty());
      EXPECT_TRUE(std::is_sorted(node.entries.begin(), node.entries.end()));
      bool identical = true;
      for (auto e : node.entries) {
        identical = identical && std::equal(table[e].begin(), table[e].end(), table[node.entries[0]].begin());
        EXPECT_TRUE(node.mbr.contains(table[e]));
        seen.insert(e);
      }
      EXPECT_TRUE(node.entries.size() < n || identical);
    } else {
      EXPECT_TRUE(node.entries.empty());
      EXPECT_LE(node.children.size(), b);
      EXPECT_GE(node.children.size(), 2u);
      for (auto c : node.children) EXPECT_TRUE(node.mbr.contains(tree.node(c).mbr));
    }
  }
  EXPECT_EQ(seen.size(), edge_count);
  EXPECT_EQ(std::set<EdgeId>(seen.begin(), seen.end()).size(), edge_count);
}

TEST(CgqTree, TwentyEightEdgesWithIdenticalBlock) {
  std::vector<double> values;
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(0, 1);
  for (int e = 0; e < 28; ++e) {
    if (e % 3 == 0 && e < 30) {
      // ten edges share one vector
      values.insert(values.end(), {0.5, 0.5});
    } else {
      values.insert(values.end(), {u(rng), u(rng)});
    }
  }
  AssociationTable table(2, values);
  std::vector<EdgeId> edges(28);
  std::iota(edges.begin(), edges.end(), EdgeId{0});
  auto tree = construct_tree(table, edges, 3, 4);
  check_tree(tree, table, 28, 3, 4);
  EXPECT_EQ(tree.root().children.size(), 3u);
  EXPECT_EQ(tree.root().mbr, mbr_of(table, edges));
  // the identical block ends up in leaves that may exceed the threshold
  std::size_t block = 0;
  for (const auto& node : tree.nodes()) {
    if (!node.leaf()) continue;
    for (auto e : node.entries) block += e % 3 == 0;
  }
  EXPECT_EQ(block, 10u);
}

TEST(CgqTree, AllIdenticalIsSingleLeaf) {
  AssociationTable table(2, std::vector<double>(2 * 50, 0.25));
  std::vector<EdgeId> edges(50);
  std::iota(edges.begin(), edges.end(), EdgeId{0});
  auto tree = construct_tree(table, edges, 4, 3);
  EXPECT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.root().entries.size(), 50u);
  EXPECT_EQ(tree.height(), 1u);
}

TEST(CgqTree, InvariantsOnRandomGraphs) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const bool directed = trial % 2 == 1;
    auto g = random_graph(40, 60 + static_cast<std::size_t>(trial) * 10, directed, rng);
    const auto table = association_table(g);
    const std::size_t b = 2 + static_cast<std::size_t>(trial % 4);
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 7);
    std::vector<EdgeId> edges(g.edge_count());
    std::iota(edges.begin(), edges.end(), EdgeId{0});
    auto tree = construct_tree(table, edges, b, n);
    check_tree(tree, table, g.edge_count(), b, n);
    // same input, same tree
    EXPECT_EQ(tree, construct_tree(table, edges, b, n));
  }
}

TEST(CgqTree, RejectsBadParameters) {
  AssociationTable table(1, {0.5, 0.2});
  EXPECT_THROW(construct_tree(table, {0, 1}, 1, 4), std::invalid_argument);
  EXPECT_THROW(construct_tree(table, {0, 1}, 2, 0), std::invalid_argument);
  EXPECT_THROW(construct_tree(table, {}, 2, 4), std::invalid_argument);
}

TEST(IndexParams, Validation) {
  IndexParams p;
  EXPECT_NO_THROW(p.validate());
  p.branching = 1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.buckets = 0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(CgqIndex, BuildAndRoundTrip) {
  std::mt19937_64 rng(44);
  auto g = random_graph(50, 150, false, rng);
  IndexParams params;
  params.branching = 3;
  params.leaf_threshold = 8;
  params.buckets = 5;
  auto index = build_index(g, params);
  EXPECT_EQ(index.associations().size(), g.edge_count());
  EXPECT_EQ(index.summaries().size(), g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); e += 7) {
    EXPECT_EQ(index.summary(e), neighborhood_summary(g, e, 5));
  }
  std::stringstream buf;
  write_index(buf, index);
  const auto bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "CGQ1");
  auto back = read_index(buf);
  EXPECT_EQ(back, index);
  EXPECT_EQ(back.target().label(3), g.label(3));

  // truncation anywhere is detected
  for (std::size_t cut : {std::size_t{3}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
    std::stringstream part(bytes.substr(0, cut));
    EXPECT_THROW(read_index(part), FormatError) << cut;
  }
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream bad_magic(bad);
  EXPECT_THROW(read_index(bad_magic), FormatError);
  std::string future = bytes;
  future[4] = 9;
  std::stringstream bad_version(future);
  EXPECT_THROW(read_index(bad_version), FormatError);
}

TEST(CgqIndex, SaveAndLoadFile) {
  auto index = build_index(testing::faculty_target());
  const auto path = std::filesystem::temp_directory_path() / "cgq_index_test.idx";
  save_index(index, path);
  EXPECT_EQ(load_index(path), index);
  std::filesystem::remove(path);
  EXPECT_THROW(load_index(path), Error);
}

TEST(CgqIndex, RejectsEdgelessTarget) {
  GraphBuilder b(testing::faculty_schema(), false);
  b.add_node("x", {std::string("a"), std::string("b"), 1.0});
  EXPECT_THROW(build_index(std::move(b).build()), ValidationError);
}

}  // namespace
}  // namespace cgq
