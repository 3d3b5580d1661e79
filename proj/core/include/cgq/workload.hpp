#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "cgq/graph.hpp"

namespace cgq {

/// Spatial proximity graph with four smooth numeric fields and one clustered
/// categorical field, shaped like a biodiversity survey grid.
struct SpatialGraphSpec {
  std::size_t nodes = 1434;
  std::size_t edges = 15069;
  std::size_t categories = 27;
  std::uint64_t seed = 20170101;
};

FeatureSchema spatial_schema();

/// Points uniform in the unit square; the `edges` closest pairs become edges.
Graph spatial_graph(const SpatialGraphSpec& spec = {});

/// Picks a target edge uniformly, then repeatedly adds an edge chosen uniformly
/// among those touching the current subgraph. Node labels and features are
/// copied from the target. Throws ValidationError if the component is too small.
Graph grow_query(const Graph& target, std::size_t edges, std::mt19937_64& rng);

/// numeric, categorical and categorical-set features.
FeatureSchema mixed_schema();

/// Random node values for mixed_schema: small integer numerics (zeros
/// included), three categories, subsets of three symbols.
std::vector<FeatureValue> random_mixed_features(std::mt19937_64& rng);

/// Uniform random simple graph over mixed_schema. `edges` is capped at the
/// number of available vertex pairs.
Graph random_graph(std::size_t nodes, std::size_t edges, bool directed, std::mt19937_64& rng);

/// Connected random graph over mixed_schema with exactly `edges` edges.
Graph random_connected_graph(std::size_t edges, bool directed, std::mt19937_64& rng);

}  // namespace cgq
