#include "cgq/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cgq/error.hpp"

namespace cgq {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

bool skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

FeatureValue parse_cell(std::string_view cell, FeatureKind kind, const std::string& source, std::size_t line) {
  switch (kind) {
    case FeatureKind::numeric: {
      auto value = parse_double(cell);
      if (!value) throw ParseError(source, line, "invalid numeric value '" + std::string(cell) + "'");
      return *value;
    }
    case FeatureKind::categorical:
      if (cell.empty()) throw ParseError(source, line, "empty categorical value");
      return std::string(cell);
    case FeatureKind::categorical_set: {
      SymbolSet symbols;
      if (!cell.empty()) {
        for (auto part : split(cell, ',')) {
          part = trim(part);
          if (!part.empty()) symbols.emplace_back(part);
        }
      }
      return symbols;
    }
  }
  throw ParseError(source, line, "unknown feature kind");
}

template <typename Fn>
void for_each_edge_line(std::istream& edges, const std::string& source, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(edges, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (skippable(line)) continue;
    auto cells = split(line, '\t');
    if (cells.size() != 2) throw ParseError(source, line_no, "expected 'src<TAB>dst'");
    try {
      fn(cells[0], cells[1]);
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

SchemaFile parse_schema(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("schema", 0, e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw ParseError("schema", 0, "expected an object with a 'features' array");
  }
  std::vector<FeatureSpec> features;
  SchemaFile out;
  try {
    for (const auto& f : doc["features"]) {
      if (!f.is_object() || !f.contains("name") || !f.contains("kind") || !f["name"].is_string() ||
          !f["kind"].is_string()) {
        throw ParseError("schema", 0, "each feature needs string 'name' and 'kind'");
      }
      features.push_back({f["name"].get<std::string>(), parse_feature_kind(f["kind"].get<std::string>())});
    }
    out.schema = FeatureSchema(std::move(features));
  } catch (const ValidationError& e) {
    throw ParseError("schema", 0, e.what());
  }
  if (doc.contains("directed")) {
    if (!doc["directed"].is_boolean()) throw ParseError("schema", 0, "'directed' must be a boolean");
    out.directed = doc["directed"].get<bool>();
  }
  return out;
}

SchemaFile load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_schema(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::string schema_to_json(const FeatureSchema& schema, bool directed) {
  nlohmann::json doc;
  doc["directed"] = directed;
  doc["features"] = nlohmann::json::array();
  for (const auto& f : schema.features()) {
    doc["features"].push_back({{"name", f.name}, {"kind", std::string(to_string(f.kind))}});
  }
  return doc.dump(2);
}

Graph read_graph(std::istream& nodes, std::istream& edges, const FeatureSchema& schema, bool directed,
                 const std::string& nodes_source, const std::string& edges_source) {
  GraphBuilder builder(schema, directed);
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::size_t> column_to_feature;  // header column (after id) -> schema index
  bool header_seen = false;
  while (std::getline(nodes, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    auto cells = split(line, '\t');
    if (!header_seen) {
      header_seen = true;
      if (cells.size() != schema.dimension() + 1) {
        throw ParseError(nodes_source, line_no,
                         "header has " + std::to_string(cells.size() - 1) + " feature columns, schema declares " +
                             std::to_string(schema.dimension()));
      }
      std::vector<bool> used(schema.dimension(), false);
      for (std::size_t c = 1; c < cells.size(); ++c) {
        auto idx = schema.index_of(trim(cells[c]));
        if (!idx) throw ParseError(nodes_source, line_no, "unknown feature column '" + std::string(cells[c]) + "'");
        if (used[*idx]) throw ParseError(nodes_source, line_no, "repeated feature column '" + std::string(cells[c]) + "'");
        used[*idx] = true;
        column_to_feature.push_back(*idx);
      }
      continue;
    }
    if (cells.size() != schema.dimension() + 1) {
      throw ParseError(nodes_source, line_no,
                       "expected " + std::to_string(schema.dimension() + 1) + " columns, found " +
                           std::to_string(cells.size()));
    }
    std::vector<FeatureValue> values(schema.dimension());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto f = column_to_feature[c - 1];
      values[f] = parse_cell(trim(cells[c]), schema[f].kind, nodes_source, line_no);
    }
    auto id = trim(cells[0]);
    if (id.empty()) throw ParseError(nodes_source, line_no, "empty node id");
    try {
      builder.add_node(std::string(id), std::move(values));
    } catch (const ValidationError& e) {
      throw ParseError(nodes_source, line_no, e.what());
    }
  }
  if (!header_seen) throw ParseError(nodes_source, 0, "missing header row");

  for_each_edge_line(edges, edges_source, [&](std::string_view src, std::string_view dst) {
    builder.add_edge(trim(src), trim(dst));
  });
  return std::move(builder).build();
}

Graph read_edges_with_features(std::istream& edges, const Graph& features_from, const std::string& edges_source) {
  GraphBuilder builder(features_from.schema(), features_from.directed());
  auto features_of = [&](std::string_view label) {
    auto source = features_from.find_node(label);
    if (!source) throw ValidationError("endpoint not found: '" + std::string(label) + "'");
    auto f = features_from.features(*source);
    return std::vector<FeatureValue>(f.begin(), f.end());
  };
  std::vector<std::string> seen;
  for_each_edge_line(edges, edges_source, [&](std::string_view src, std::string_view dst) {
    for (auto label : {trim(src), trim(dst)}) {
      if (std::find(seen.begin(), seen.end(), label) == seen.end()) {
        builder.add_node(std::string(label), features_of(label));
        seen.emplace_back(label);
      }
    }
    builder.add_edge(trim(src), trim(dst));
  });
  return std::move(builder).build();
}

Graph load_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                 const FeatureSchema& schema, bool directed) {
  auto nodes = open_input(nodes_path);
  auto edges = open_input(edges_path);
  return read_graph(nodes, edges, schema, directed, nodes_path.string(), edges_path.string());
}

void write_nodes(std::ostream& out, const Graph& g) {
  out << "id";
  for (const auto& f : g.schema().features()) out << '\t' << f.name;
  out << '\n';
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << g.label(v);
    for (const auto& value : g.features(v)) out << '\t' << format_feature_value(value);
    out << '\n';
  }
}

void write_edges(std::ostream& out, const Graph& g) {
  for (const auto& e : g.edges()) out << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
}

void write_graph(const Graph& g, const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path) {
  std::ofstream nodes(nodes_path);
  std::ofstream edges(edges_path);
  if (!nodes || !edges) throw Error("cannot write graph files");
  write_nodes(nodes, g);
  write_edges(edges, g);
}

}  // namespace cgq
