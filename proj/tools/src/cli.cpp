#include "cgq_tools/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cgq/error.hpp"
#include "cgq/graph_io.hpp"
#include "cgq/index.hpp"
#include "cgq/intent.hpp"
#include "cgq/search.hpp"
#include "cgq/workload.hpp"
#include "cgq_tools/bench.hpp"
#include "json.hpp"

namespace cgq::tools {

namespace {

using nlohmann::json;

enum class Format { json_lines, tsv };

struct Config {
  std::string schema;
  std::string nodes;
  std::string edges;
  std::string index;
  std::vector<std::string> queries;
  std::vector<std::string> query_nodes;
  std::string bijection;
  std::string dump_null_model;
  std::size_t k = 10;
  double r = 0.0;
  std::size_t beam_width = 50;
  IndexParams index_params;
  std::string scorer = "contextual";
  std::uint64_t seed = 1;
  std::string format = "json-lines";
  std::string weight_mode = "averaged";
  std::string agg_mode = "min";
  std::size_t edge_cap = 5000;
  bool force = false;
  std::size_t jobs = 1;
  std::vector<std::size_t> sizes{3, 4, 5, 6, 7, 8};
  std::size_t bench_queries = 30;
  bool bench_oracle = false;
  double oracle_budget = 4.0;
};

std::string format_score(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

Graph load_target(const Config& c) {
  if (c.schema.empty() || c.nodes.empty() || c.edges.empty()) {
    throw ValidationError("target graph needs --schema, --nodes and --edges");
  }
  const auto s = load_schema(c.schema);
  return load_graph(c.nodes, c.edges, s.schema, s.directed);
}

CgqIndex obtain_index(const Config& c) {
  if (!c.index.empty()) return load_index(c.index);
  return build_index(load_target(c), c.index_params);
}

/// Query given by edges alone takes node features from the target by label.
std::vector<Graph> load_queries(const Config& c, const Graph& target) {
  if (c.queries.empty()) throw ValidationError("at least one --query is required");
  if (!c.query_nodes.empty() && c.query_nodes.size() != c.queries.size()) {
    throw ValidationError("--query-nodes must be given once per --query");
  }
  std::vector<Graph> out;
  for (std::size_t i = 0; i < c.queries.size(); ++i) {
    auto edges = open(c.queries[i]);
    if (c.query_nodes.empty()) {
      out.push_back(read_edges_with_features(edges, target, c.queries[i]));
    } else {
      auto nodes = open(c.query_nodes[i]);
      out.push_back(read_graph(nodes, edges, target.schema(), target.directed(), c.query_nodes[i], c.queries[i]));
    }
  }
  return out;
}

SearchParams search_params(const Config& c) {
  SearchParams p;
  p.k = c.k;
  p.beam_width = c.beam_width;
  p.scorer = parse_scorer(c.scorer);
  p.rng_seed = c.seed;
  p.validate();
  return p;
}

class Emitter {
 public:
  Emitter(std::ostream& out, Format format) : out_(out), format_(format) {}

  void header(const std::string& command, const Graph& target, const WeightVector& w, json extra = json::object()) {
    if (format_ == Format::json_lines) {
      json h{{"type", "header"}, {"command", command}};
      json names = json::array();
      for (const auto& f : target.schema().features()) names.push_back(f.name);
      h["features"] = names;
      h["weights"] = w.w;
      h.update(extra);
      out_ << h.dump() << '\n';
      return;
    }
    out_ << "# command\t" << command << '\n' << "# weights";
    for (std::size_t i = 0; i < w.size(); ++i) {
      out_ << '\t' << target.schema().features()[i].name << '=' << format_score(w[i]);
    }
    out_ << '\n';
    for (const auto& [key, value] : extra.items()) out_ << "# " << key << '\t' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    out_ << "rank\tscore\tedges\tmapping" << (extra_columns_.empty() ? "" : "\t" + extra_columns_) << '\n';
  }

  void set_extra_columns(std::string names) { extra_columns_ = std::move(names); }

  void match(std::size_t rank, const ScoredMatch& m, const Graph& q, const Graph& t, json extra = json::object()) {
    if (format_ == Format::json_lines) {
      json mapping = json::array();
      for (const auto& [a, b] : m.mapping.nodes) mapping.push_back({q.label(a), t.label(b)});
      json rec{{"type", "match"}, {"rank", rank}, {"score", m.score}, {"edges", m.mapping.edges.size()},
               {"mapping", mapping}};
      rec.update(extra);
      out_ << rec.dump() << '\n';
      return;
    }
    out_ << rank << '\t' << format_score(m.score) << '\t' << m.mapping.edges.size() << '\t';
    for (std::size_t i = 0; i < m.mapping.nodes.size(); ++i) {
      const auto& [a, b] = m.mapping.nodes[i];
      out_ << (i ? "," : "") << q.label(a) << '=' << t.label(b);
    }
    for (const auto& [key, value] : extra.items()) {
      out_ << '\t' << (value.is_number_float() ? format_score(value.get<double>()) : value.dump());
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  Format format_;
  std::string extra_columns_;
};

Format parse_format(const std::string& f) {
  if (f == "json-lines") return Format::json_lines;
  if (f == "tsv") return Format::tsv;
  throw ValidationError("unknown format '" + f + "'");
}

void emit_matches(Emitter& emit, const std::vector<ScoredMatch>& matches, const Graph& q, const Graph& t) {
  for (std::size_t i = 0; i < matches.size(); ++i) emit.match(i + 1, matches[i], q, t);
}

void maybe_dump_null_model(const Config& c, const CgqIndex& index) {
  if (c.dump_null_model.empty()) return;
  std::ofstream out(c.dump_null_model);
  if (!out) throw Error("cannot open '" + c.dump_null_model + "' for writing");
  out << index.null_model().to_json() << '\n';
}

json index_stats(const CgqIndex& index) {
  const auto& t = index.target();
  return {{"nodes", t.node_count()},
          {"edges", t.edge_count()},
          {"directed", t.directed()},
          {"tree_nodes", index.tree().nodes().size()},
          {"tree_height", index.tree().height()},
          {"leaves", index.tree().leaf_count()},
          {"branching", index.params().branching},
          {"leaf_threshold", index.params().leaf_threshold},
          {"buckets", index.params().buckets},
          {"bins", index.params().bins}};
}

void write_stats(std::ostream& out, Format format, const json& stats) {
  if (format == Format::json_lines) {
    out << stats.dump() << '\n';
    return;
  }
  for (const auto& [key, value] : stats.items()) out << key << '\t' << value.dump() << '\n';
}

int cmd_build_index(const Config& c, std::ostream& out) {
  if (c.index.empty()) throw ValidationError("build-index needs --index for the output file");
  auto target = load_target(c);
  const auto start = std::chrono::steady_clock::now();
  auto index = build_index(std::move(target), c.index_params);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_index(index, c.index);
  maybe_dump_null_model(c, index);
  auto stats = index_stats(index);
  stats["build_seconds"] = seconds;
  write_stats(out, parse_format(c.format), stats);
  return 0;
}

int cmd_stats(const Config& c, std::ostream& out) {
  auto index = obtain_index(c);
  maybe_dump_null_model(c, index);
  write_stats(out, parse_format(c.format), index_stats(index));
  return 0;
}

int cmd_query(const Config& c, std::ostream& out) {
  auto index = obtain_index(c);
  maybe_dump_null_model(c, index);
  const auto params = search_params(c);
  const auto q = load_queries(c, index.target()).front();
  auto result = cgq_topk(q, index, params);
  Emitter emit(out, parse_format(c.format));
  emit.header("query", index.target(), result.weights, {{"k", params.k}, {"scorer", c.scorer}});
  emit_matches(emit, result.matches, q, index.target());
  return 0;
}

int cmd_range(const Config& c, std::ostream& out) {
  auto index = obtain_index(c);
  const auto q = load_queries(c, index.target()).front();
  auto result = cgq_range(q, index, c.r);
  Emitter emit(out, parse_format(c.format));
  emit.header("range", index.target(), result.weights, {{"r", c.r}});
  emit_matches(emit, result.matches, q, index.target());
  return 0;
}

int cmd_oracle(const Config& c, std::ostream& out) {
  auto target = c.index.empty() ? load_target(c) : load_index(c.index).target();
  if (target.edge_count() > c.edge_cap && !c.force) {
    throw ValidationError("target has " + std::to_string(target.edge_count()) + " edges, above the oracle cap of " +
                          std::to_string(c.edge_cap) + "; pass --force to run anyway");
  }
  const auto params = search_params(c);
  const auto q = load_queries(c, target).front();
  const auto nm = estimate_null_model(target, fit_binner(target, c.index_params.bins));
  const auto w = weight_vector(q, nm);
  auto result = naive_topk(q, target, w, params.k, params.scorer);
  Emitter emit(out, parse_format(c.format));
  emit.header("oracle", target, w, {{"k", params.k}, {"scorer", c.scorer}});
  emit_matches(emit, result.matches, q, target);
  return 0;
}

int cmd_intent(const Config& c, std::ostream& out) {
  auto index = obtain_index(c);
  if (c.queries.size() < 2) throw ValidationError("intent needs at least two --query exemplars");
  if (c.bijection.empty()) throw ValidationError("intent needs a --bijection file");
  auto exemplars = load_queries(c, index.target());
  auto in = open(c.bijection);
  auto es = ExemplarSet::from_entries(std::move(exemplars), read_bijections(in, c.bijection),
                                      parse_weight_mode(c.weight_mode), parse_agg_mode(c.agg_mode));
  const auto ctx = hybrid_context(es, index.null_model());
  const auto params = search_params(c);
  auto result = intent_topk(es, index, params, ctx);
  Emitter emit(out, parse_format(c.format));
  const auto& names = es.first().schema().features();
  auto named = [&](const std::vector<std::size_t>& ids) {
    json a = json::array();
    for (auto i : ids) a.push_back(names[i].name);
    return a;
  };
  emit.set_extra_columns("exemplar_score");
  emit.header("intent", index.target(), ctx.weights,
              {{"k", params.k}, {"exact_match", named(ctx.exact_match)}, {"exact_relation", named(ctx.exact_relation)},
               {"all_constraint", ctx.all_constraint}, {"weight_mode", c.weight_mode}, {"agg_mode", c.agg_mode}});
  for (std::size_t i = 0; i < result.matches.size(); ++i) {
    const auto& m = result.matches[i];
    const auto score = exemplar_similarity(m.mapping, es, index.target(), index.null_model());
    emit.match(i + 1, m, es.first(), index.target(), {{"exemplar_score", score.aggregate}});
  }
  return 0;
}

int cmd_bench(const Config& c, std::ostream& out) {
  // without a target, the default spatial workload
  auto index = c.index.empty() && c.schema.empty() && c.nodes.empty() && c.edges.empty()
                   ? build_index(spatial_graph(), c.index_params)
                   : obtain_index(c);
  BenchConfig bc;
  bc.sizes = c.sizes;
  bc.queries = c.bench_queries;
  bc.seed = c.seed;
  bc.search = search_params(c);
  bc.oracle = c.bench_oracle;
  bc.oracle_budget_seconds = c.oracle_budget;
  bc.jobs = c.jobs;
  const auto rows = run_bench(index, bc);
  out << "size\tqueries\tcgq_mean_ms\tcgq_median_ms";
  if (bc.oracle) out << "\toracle_mean_ms\tspeedup\toracle_timeouts\tdisagreements";
  out << '\n';
  for (const auto& row : rows) {
    out << row.size << '\t' << row.runs.size() << '\t' << format_score(row.cgq_mean_ms()) << '\t'
        << format_score(row.cgq_median_ms());
    if (bc.oracle) {
      out << '\t' << format_score(row.oracle_mean_ms()) << '\t' << format_score(row.speedup()) << '\t'
          << row.oracle_timeouts() << '\t' << row.disagreements();
    }
    out << '\n';
  }
  return 0;
}

void add_target_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--schema", c.schema, "Schema JSON of the target graph");
  cmd->add_option("--nodes", c.nodes, "Target nodes TSV");
  cmd->add_option("--edges", c.edges, "Target edges TSV");
  cmd->add_option("--branching", c.index_params.branching, "Tree branching factor")->check(CLI::PositiveNumber);
  cmd->add_option("--leaf-threshold", c.index_params.leaf_threshold, "Leaf size threshold")->check(CLI::PositiveNumber);
  cmd->add_option("--buckets", c.index_params.buckets, "Neighbourhood summary buckets")->check(CLI::PositiveNumber);
  cmd->add_option("--bins", c.index_params.bins, "Quantile bins for numeric features")->check(CLI::PositiveNumber);
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json-lines", "tsv"}));
  cmd->add_option("--dump-null-model", c.dump_null_model, "Write the null model as JSON to this path");
}

void add_search_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--index", c.index, "Index file built by build-index");
  cmd->add_option("--query", c.queries, "Query edges TSV (repeatable)");
  cmd->add_option("--query-nodes", c.query_nodes, "Query nodes TSV, one per --query");
  cmd->add_option("--k", c.k, "Number of answers")->check(CLI::PositiveNumber);
  cmd->add_option("--beam-width", c.beam_width, "Seeds grown together")->check(CLI::PositiveNumber);
  cmd->add_option("--scorer", c.scorer, "contextual or traditional")->check(CLI::IsMember({"contextual", "traditional"}));
  cmd->add_option("--seed", c.seed, "Random seed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual graph query tool"};
  app.require_subcommand(1);
  Config c;

  auto* build = app.add_subcommand("build-index", "Build and save an index over a target graph");
  add_target_options(build, c);
  build->add_option("--index", c.index, "Output index file")->required();

  auto* stats = app.add_subcommand("stats", "Print index statistics");
  add_target_options(stats, c);
  stats->add_option("--index", c.index, "Index file");

  auto* query = app.add_subcommand("query", "Top-k contextual matches");
  add_target_options(query, c);
  add_search_options(query, c);

  auto* range = app.add_subcommand("range", "All matches scoring at least --r");
  add_target_options(range, c);
  add_search_options(range, c);
  range->add_option("--r", c.r, "Score threshold")->required();

  auto* oracle = app.add_subcommand("oracle", "Top-k by exhaustive enumeration");
  add_target_options(oracle, c);
  add_search_options(oracle, c);
  oracle->add_option("--edge-cap", c.edge_cap, "Largest target accepted without --force");
  oracle->add_flag("--force", c.force, "Run beyond the edge cap");

  auto* intent = app.add_subcommand("intent", "Top-k from several exemplar queries");
  add_target_options(intent, c);
  add_search_options(intent, c);
  intent->add_option("--bijection", c.bijection, "Node correspondences between exemplars");
  intent->add_option("--weight-mode", c.weight_mode)->check(CLI::IsMember({"individual", "averaged"}));
  intent->add_option("--agg-mode", c.agg_mode)->check(CLI::IsMember({"min", "mean"}));

  auto* bench = app.add_subcommand("bench", "Latency table over generated queries");
  add_target_options(bench, c);
  add_search_options(bench, c);
  bench->add_option("--sizes", c.sizes, "Query sizes in edges")->delimiter(',');
  bench->add_option("--queries", c.bench_queries, "Queries per size")->check(CLI::PositiveNumber);
  bench->add_flag("--oracle", c.bench_oracle, "Also time the exhaustive oracle");
  bench->add_option("--oracle-budget", c.oracle_budget, "Seconds allowed per oracle run")->check(CLI::PositiveNumber);
  bench->add_option("--jobs", c.jobs, "Queries timed in parallel")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*build) return cmd_build_index(c, out);
    if (*stats) return cmd_stats(c, out);
    if (*query) return cmd_query(c, out);
    if (*range) return cmd_range(c, out);
    if (*oracle) return cmd_oracle(c, out);
    if (*intent) return cmd_intent(c, out);
    if (*bench) return cmd_bench(c, out);
  } catch (const std::exception& e) {
    err << "cgq: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cgq::tools
