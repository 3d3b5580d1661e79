#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cgq/graph.hpp"

namespace cgq {

/// Contents of a schema file: `{"directed": bool, "features": [{"name", "kind"}]}`.
struct SchemaFile {
  FeatureSchema schema;
  bool directed = false;
};

SchemaFile load_schema(const std::filesystem::path& path);
SchemaFile parse_schema(const std::string& json_text);
std::string schema_to_json(const FeatureSchema& schema, bool directed);

/// Reads a tab-separated nodes file (header `id<TAB>feature...`) and an edges
/// file (`src<TAB>dst`, `#` comments). Header columns are matched to schema
/// features by name. Throws ParseError (with line) or ValidationError.
Graph load_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                 const FeatureSchema& schema, bool directed);

/// Stream variants used by load_graph; `source` names the stream in errors.
Graph read_graph(std::istream& nodes, std::istream& edges, const FeatureSchema& schema, bool directed,
                 const std::string& nodes_source = "nodes", const std::string& edges_source = "edges");

/// Reads only the edges stream; node features come from `features_from`, matched by label.
/// Used for query graphs given as structure only.
Graph read_edges_with_features(std::istream& edges, const Graph& features_from,
                               const std::string& edges_source = "edges");

void write_nodes(std::ostream& out, const Graph& g);
void write_edges(std::ostream& out, const Graph& g);
void write_graph(const Graph& g, const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path);

}  // namespace cgq
