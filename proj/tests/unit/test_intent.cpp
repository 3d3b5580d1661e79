#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "cgq/error.hpp"
#include "cgq/intent.hpp"
#include "cgq/workload.hpp"
#include "fixtures.hpp"

namespace cgq {
namespace {

/// Same shape as faculty_query, same org, different areas (two shared) and h-indices.
Graph second_exemplar() {
  GraphBuilder b(testing::faculty_schema(), false);
  b.add_node("c3", {std::string("west"), std::string("OS"), 60.0});
  b.add_node("c1", {std::string("west"), std::string("PL"), 20.0});
  b.add_node("c2", {std::string("west"), std::string("PL"), 30.0});
  b.add_edge("c1", "c2");
  b.add_edge("c1", "c3");
  b.add_edge("c3", "c2");
  return std::move(b).build();
}

std::vector<BijectionEntry> faculty_bijection() {
  return {{0, 1, "a1", "c1"}, {0, 1, "a2", "c2"}, {0, 1, "a3", "c3"}};
}

ExemplarSet faculty_exemplars(WeightMode wm = WeightMode::averaged, AggMode am = AggMode::min) {
  return ExemplarSet::from_entries({testing::faculty_query(), second_exemplar()}, faculty_bijection(), wm, am);
}

TEST(Modes, Names) {
  EXPECT_EQ(parse_weight_mode("individual"), WeightMode::individual);
  EXPECT_EQ(parse_agg_mode(to_string(AggMode::mean)), AggMode::mean);
  EXPECT_THROW(parse_weight_mode("median"), ValidationError);
  EXPECT_THROW(parse_agg_mode("max"), ValidationError);
}

TEST(Bijections, ParseFile) {
  std::istringstream in("# header\n0\t1\ta1\tc1\r\n\n0\t2\ta2\tx\n");
  auto entries = read_bijections(in);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].node_j, "c1");
  EXPECT_EQ(entries[1].exemplar_j, 2u);
  std::istringstream short_line("0\t1\ta1\n");
  EXPECT_THROW(read_bijections(short_line), ParseError);
  std::istringstream bad_index("0\tone\ta1\tc1\n");
  try {
    read_bijections(bad_index, "b.tsv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ExemplarSet, ResolvesLabelledBijection) {
  auto es = faculty_exemplars();
  EXPECT_EQ(es.size(), 2u);
  EXPECT_EQ(es.exemplar(1).label(es.node_in(1, 0)), "c1");
  EXPECT_EQ(es.exemplar(1).label(es.node_in(1, 2)), "c3");
  // a2-a3 is edge 2; c2-c3 is edge 2 of the second exemplar
  EXPECT_EQ(es.edge_in(1, 2), 2u);
  EXPECT_EQ(es.edge_in(1, 1), 1u);
}

TEST(ExemplarSet, RejectsBrokenBijections) {
  auto two = [] { return std::vector<Graph>{testing::faculty_query(), second_exemplar()}; };
  EXPECT_THROW(ExemplarSet::from_entries(two(), {{0, 1, "a1", "c1"}}), ValidationError);
  EXPECT_THROW(ExemplarSet::from_entries(two(), {{0, 1, "a1", "c1"}, {0, 1, "a1", "c2"}, {0, 1, "a3", "c3"}}),
               ValidationError);
  EXPECT_THROW(ExemplarSet::from_entries(two(), {{0, 1, "zz", "c1"}}), ValidationError);
  EXPECT_THROW(ExemplarSet::from_entries({testing::faculty_query()}, {}), ValidationError);
  EXPECT_THROW(ExemplarSet(two(), {{0, 1, 2}, {0, 0, 1}}), ValidationError);
  EXPECT_THROW(ExemplarSet(two(), {{1, 0, 2}, {0, 1, 2}}), ValidationError);
}

TEST(ExemplarSet, RejectsEdgeBreakingMap) {
  GraphBuilder b(testing::faculty_schema(), false);
  for (auto id : {"p", "r", "s"}) b.add_node(id, {std::string("w"), std::string("x"), 1.0});
  b.add_edge("p", "r");
  b.add_edge("r", "s");
  auto path = std::move(b).build();
  GraphBuilder c(testing::faculty_schema(), false);
  for (auto id : {"p", "r", "s"}) c.add_node(id, {std::string("w"), std::string("x"), 1.0});
  c.add_edge("p", "r");
  c.add_edge("p", "s");
  auto other = std::move(c).build();
  EXPECT_THROW(ExemplarSet({path, other}, {{0, 1, 2}, {0, 1, 2}}), ValidationError);
  EXPECT_NO_THROW(ExemplarSet({path, other}, {{0, 1, 2}, {1, 0, 2}}));
}

TEST(ExemplarSet, TransitiveEntriesMustAgree) {
  auto three = [] { return std::vector<Graph>{testing::faculty_query(), second_exemplar(), second_exemplar()}; };
  auto base = faculty_bijection();
  for (auto e : faculty_bijection()) base.push_back({0, 2, e.node_i, e.node_j});
  auto good = base;
  good.push_back({1, 2, "c1", "c1"});
  EXPECT_NO_THROW(ExemplarSet::from_entries(three(), good));
  auto bad = base;
  bad.push_back({1, 2, "c1", "c2"});
  EXPECT_THROW(ExemplarSet::from_entries(three(), bad), ValidationError);
}

TEST(Weights, Averaging) {
  auto avg = average_weights({WeightVector{{1, 0}}, WeightVector{{0.5, 0.5}}});
  EXPECT_EQ(avg.w, (std::vector<double>{0.75, 0.25}));
  EXPECT_THROW(average_weights({}), std::invalid_argument);
}

TEST(ExemplarSimilarity, IdenticalExemplarsReduceToSingleQuery) {
  auto q = testing::faculty_query();
  auto t = testing::faculty_target();
  const auto nm = estimate_null_model(t, fit_binner(t));
  ExemplarSet es({q, q}, {{0, 1, 2}, {0, 1, 2}});
  const auto w = weight_vector(q, nm);
  for (const auto& m : enumerate_mcs_naive(q, t).maximal) {
    for (auto am : {AggMode::min, AggMode::mean}) {
      for (auto wm : {WeightMode::individual, WeightMode::averaged}) {
        es.set_modes(wm, am);
        EXPECT_NEAR(exemplar_similarity(m, es, t, nm).aggregate, contextual_graph_similarity(m, q, t, w), 1e-12);
      }
    }
  }
}

TEST(ExemplarSimilarity, MinNeverExceedsMean) {
  auto t = testing::faculty_target();
  const auto nm = estimate_null_model(t, fit_binner(t));
  auto es = faculty_exemplars(WeightMode::individual, AggMode::min);
  for (const auto& m : enumerate_mcs_naive(es.first(), t).maximal) {
    auto lo = exemplar_similarity(m, es, t, nm);
    es.set_modes(WeightMode::individual, AggMode::mean);
    auto mean = exemplar_similarity(m, es, t, nm);
    es.set_modes(WeightMode::individual, AggMode::min);
    EXPECT_LE(lo.aggregate, mean.aggregate + 1e-12);
    EXPECT_EQ(lo.per_exemplar, mean.per_exemplar);
    EXPECT_DOUBLE_EQ(lo.aggregate, std::min(lo.per_exemplar[0], lo.per_exemplar[1]));
  }
}

TEST(ExemplarSimilarity, MappedThroughBijection) {
  auto es = faculty_exemplars();
  Mapping m{{{0, 0}, {1, 1}}, {{0, 0}}};
  auto carried = map_through(es, 1, m);
  // a1 -> c1 (node 1), a2 -> c2 (node 2), edge a1-a2 -> c1-c2 (edge 0)
  EXPECT_EQ(carried.nodes, (std::vector<NodePair>{{1, 0}, {2, 1}}));
  EXPECT_EQ(carried.edges, (std::vector<EdgePair>{{0, 0}}));
}

TEST(Hybrid, DetectsConstrainedFeatures) {
  auto es = faculty_exemplars();
  // org agrees nodewise; areas all differ in exemplar 0 while c1, c2 share one
  EXPECT_EQ(detect_exact_match_features(es), (std::vector<std::size_t>{0}));
  EXPECT_EQ(detect_exact_relation_features(es), (std::vector<std::size_t>{0}));
  ExemplarSet same({testing::faculty_query(), testing::faculty_query()}, {{0, 1, 2}, {0, 1, 2}});
  EXPECT_EQ(detect_exact_match_features(same), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Hybrid, RelationWithoutValueMatch) {
  // both exemplars have all-distinct areas, so the area component is 0 everywhere
  GraphBuilder b(testing::faculty_schema(), false);
  b.add_node("d1", {std::string("north"), std::string("X"), 112.0});
  b.add_node("d2", {std::string("north"), std::string("Y"), 125.0});
  b.add_node("d3", {std::string("north"), std::string("Z"), 133.0});
  b.add_edge("d1", "d2");
  b.add_edge("d1", "d3");
  b.add_edge("d2", "d3");
  ExemplarSet es({testing::faculty_query(), std::move(b).build()}, {{0, 1, 2}, {0, 1, 2}});
  EXPECT_EQ(detect_exact_match_features(es), (std::vector<std::size_t>{2}));
  EXPECT_EQ(detect_exact_relation_features(es), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Hybrid, WeightsSpreadOverFreeFeaturesOnly) {
  auto t = testing::faculty_target();
  const auto nm = testing::area_null_model();
  auto es = faculty_exemplars();
  auto ctx = hybrid_context(es, nm);
  EXPECT_FALSE(ctx.all_constraint);
  EXPECT_EQ(ctx.free, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(ctx.weights[0], 0.0);
  EXPECT_NEAR(ctx.weights[1] + ctx.weights[2], 1.0, 1e-12);
  ASSERT_EQ(ctx.per_exemplar.size(), 2u);
  std::vector<double> summed(2, 0.0);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto w = normalize_weights({chi_square(es.exemplar(j), 1, nm), chi_square(es.exemplar(j), 2, nm)});
    EXPECT_NEAR(ctx.per_exemplar[j][0], w[0], 1e-12);
    EXPECT_NEAR(ctx.per_exemplar[j][1], w[1], 1e-12);
    summed[0] += w[0];
    summed[1] += w[1];
  }
  EXPECT_NEAR(ctx.weights[1], summed[0] / (summed[0] + summed[1]), 1e-12);
}

TEST(Hybrid, AllConstraintFallsBackToUniform) {
  auto t = testing::faculty_target();
  const auto nm = estimate_null_model(t, fit_binner(t));
  ExemplarSet same({testing::faculty_query(), testing::faculty_query()}, {{0, 1, 2}, {0, 1, 2}});
  auto ctx = hybrid_context(same, nm);
  EXPECT_TRUE(ctx.all_constraint);
  EXPECT_TRUE(ctx.free.empty());
  for (auto x : ctx.weights.w) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(Hybrid, QueryAndTargetShareOrganisationRelation) {
  // a1..a3 -> b1..b3: org differs in value but every edge conserves it on both sides
  ExemplarSet es({testing::faculty_query(), testing::faculty_target()}, {{0, 1, 2}, {0, 1, 2}});
  auto er = detect_exact_relation_features(es);
  auto em = detect_exact_match_features(es);
  EXPECT_TRUE(std::find(er.begin(), er.end(), 0u) != er.end());
  EXPECT_TRUE(em.empty());
  for (auto i : em) EXPECT_TRUE(std::find(er.begin(), er.end(), i) != er.end());
}

TEST(Hybrid, UnconstrainedReducesToAveragedWeights) {
  // levels and tags differ everywhere, and colours too, so nothing is constrained
  GraphBuilder a(mixed_schema(), false);
  a.add_node("p", {1.0, std::string("red"), SymbolSet{"x"}});
  a.add_node("r", {2.0, std::string("red"), SymbolSet{"y"}});
  a.add_node("s", {4.0, std::string("blue"), SymbolSet{"x"}});
  a.add_edge("p", "r");
  a.add_edge("r", "s");
  GraphBuilder b(mixed_schema(), false);
  b.add_node("p", {3.0, std::string("green"), SymbolSet{"z"}});
  b.add_node("r", {3.0, std::string("blue"), SymbolSet{"z"}});
  b.add_node("s", {1.0, std::string("blue"), SymbolSet{"x", "y"}});
  b.add_edge("p", "r");
  b.add_edge("r", "s");
  ExemplarSet es({std::move(a).build(), std::move(b).build()}, {{0, 1, 2}, {0, 1, 2}});
  std::mt19937_64 rng(9);
  auto t = random_graph(30, 80, false, rng);
  const auto nm = estimate_null_model(t, fit_binner(t));
  auto ctx = hybrid_context(es, nm);
  ASSERT_EQ(ctx.free.size(), 3u);
  const auto avg = exemplar_weights(es, nm);
  ASSERT_EQ(avg.size(), 1u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ctx.weights[i], avg[0][i], 1e-12);
}

TEST(ExemplarSimilarity, MinNeverRisesWhenAnExemplarIsAdded) {
  auto t = testing::faculty_target();
  const auto nm = estimate_null_model(t, fit_binner(t));
  auto q = testing::faculty_query();
  auto two = ExemplarSet({q, second_exemplar()}, {{0, 1, 2}, {1, 2, 0}}, WeightMode::individual, AggMode::min);
  auto three = ExemplarSet({q, second_exemplar(), testing::faculty_target()}, {{0, 1, 2}, {1, 2, 0}, {0, 1, 2}},
                           WeightMode::individual, AggMode::min);
  for (const auto& m : enumerate_mcs_naive(q, t).maximal) {
    EXPECT_LE(exemplar_similarity(m, three, t, nm).aggregate, exemplar_similarity(m, two, t, nm).aggregate + 1e-12);
  }
}

TEST(Intent, TopKHonoursConstraintsAndMatchesFilteredNaive) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 15; ++trial) {
    auto target = random_graph(25, 70, trial % 2 == 1, rng);
    auto q = random_connected_graph(3, trial % 2 == 1, rng);
    // second exemplar: same structure and colours, different levels and tags
    GraphBuilder b(q.schema(), q.directed());
    for (NodeId v = 0; v < q.node_count(); ++v) {
      auto f = random_mixed_features(rng);
      f[1] = q.feature(v, 1);
      b.add_node("e" + std::to_string(v), std::move(f));
    }
    for (EdgeId e = 0; e < q.edge_count(); ++e) b.add_edge(q.edge(e).src, q.edge(e).dst);
    std::vector<NodeId> identity(q.node_count());
    std::iota(identity.begin(), identity.end(), NodeId{0});
    ExemplarSet es({q, std::move(b).build()}, {identity, identity});
    auto index = build_index(target, IndexParams{3, 5});
    auto ctx = hybrid_context(es, index.null_model());
    ASSERT_FALSE(ctx.exact_match.empty());
    EXPECT_EQ(ctx.exact_match.front(), 1u);
    SearchParams sp;
    sp.k = 5;
    auto r = intent_topk(es, index, sp, ctx);
    for (const auto& m : r.matches) {
      for (const auto& [qv, tv] : m.mapping.nodes) EXPECT_EQ(q.feature(qv, 1), target.feature(tv, 1));
    }
    NaiveOptions opt;
    opt.filter = hybrid_filter(ctx, es, index);
    auto slow = naive_topk(q, target, ctx.weights, sp.k, Scorer::contextual, opt);
    ASSERT_EQ(r.matches.size(), slow.matches.size()) << trial;
    for (std::size_t i = 0; i < r.matches.size(); ++i) EXPECT_NEAR(r.matches[i].score, slow.matches[i].score, 1e-9);
  }
}

}  // namespace
}  // namespace cgq
