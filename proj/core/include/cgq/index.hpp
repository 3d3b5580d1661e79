#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "cgq/context.hpp"
#include "cgq/graph.hpp"
#include "cgq/similarity.hpp"

namespace cgq {

/// Axis-parallel box over association vectors; 0 <= lo[i] <= hi[i] <= 1.
struct Mbr {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const noexcept { return lo.size(); }
  bool contains(std::span<const double> s) const;
  bool contains(const Mbr& inner) const;

  friend bool operator==(const Mbr&, const Mbr&) = default;
};

/// Componentwise min/max. Throws std::invalid_argument on empty or ragged input.
Mbr mbr_of(const std::vector<AssociationVector>& vectors);
Mbr mbr_of(const AssociationTable& table, std::span<const EdgeId> edges);

/// Upper bound on edge_similarity(s_q, s, w) for every s inside h.
double mbr_similarity(std::span<const double> query, const WeightVector& w, const Mbr& h);

inline constexpr std::size_t kDefaultBuckets = 10;

/// 1-based bucket of an association value: ceil(v * B) clamped to [1, B].
std::size_t bucket_of(double value, std::size_t buckets);

/// Per-feature histogram of neighbouring edges' association values.
class NeighborhoodSummary {
 public:
  NeighborhoodSummary() = default;
  NeighborhoodSummary(std::size_t dimension, std::size_t buckets);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t buckets() const noexcept { return buckets_; }
  /// j is 1-based.
  std::uint32_t count(std::size_t feature, std::size_t j) const { return counts_.at(feature * buckets_ + j - 1); }
  void add(std::size_t feature, std::size_t j) { ++counts_.at(feature * buckets_ + j - 1); }
  const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }
  std::vector<std::uint32_t>& counts() noexcept { return counts_; }

  friend bool operator==(const NeighborhoodSummary&, const NeighborhoodSummary&) = default;

 private:
  std::size_t dimension_ = 0;
  std::size_t buckets_ = 0;
  std::vector<std::uint32_t> counts_;
};

NeighborhoodSummary neighborhood_summary(const Graph& g, EdgeId e, std::size_t buckets = kDefaultBuckets,
                                         std::size_t radius = 1);
NeighborhoodSummary neighborhood_summary(const Graph& g, const AssociationTable& table, EdgeId e,
                                         std::size_t buckets, std::size_t radius = 1);

/// sum_i w_i * ns_i, where ns_i is the fraction of the query's nonzero buckets in
/// which the target count is at least the query count (1 if there are none).
double neighborhood_similarity(const NeighborhoodSummary& query, const NeighborhoodSummary& target,
                               const WeightVector& w);

struct IndexParams {
  std::size_t branching = 4;
  std::size_t leaf_threshold = 100;
  std::size_t buckets = kDefaultBuckets;
  std::size_t radius = 1;
  std::size_t bins = kDefaultContinuousBins;

  /// Throws ValidationError on out-of-range values.
  void validate() const;

  friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

struct TreeNode {
  Mbr mbr;
  std::vector<std::uint32_t> children;  // indices into CgqTree::nodes()
  std::vector<EdgeId> entries;          // leaf only

  bool leaf() const noexcept { return children.empty(); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Variance-split hierarchy of MBRs, stored in pre-order with the root at index 0.
class CgqTree {
 public:
  CgqTree() = default;
  explicit CgqTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::uint32_t i) const { return nodes_.at(i); }
  const TreeNode& root() const { return nodes_.at(0); }
  std::size_t height() const;
  std::size_t leaf_count() const;

  friend bool operator==(const CgqTree&, const CgqTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Requires branching >= 2, leaf_threshold >= 1 and at least one edge.
CgqTree construct_tree(const AssociationTable& table, std::vector<EdgeId> edges, std::size_t branching,
                       std::size_t leaf_threshold);

/// Everything a query needs about one target graph.
class CgqIndex {
 public:
  CgqIndex() = default;
  CgqIndex(Graph target, IndexParams params, NullModel null_model, AssociationTable associations,
           std::vector<NeighborhoodSummary> summaries, CgqTree tree);

  const Graph& target() const noexcept { return target_; }
  const IndexParams& params() const noexcept { return params_; }
  const NullModel& null_model() const noexcept { return null_model_; }
  const AssociationTable& associations() const noexcept { return associations_; }
  const NeighborhoodSummary& summary(EdgeId e) const { return summaries_.at(e); }
  const std::vector<NeighborhoodSummary>& summaries() const noexcept { return summaries_; }
  const CgqTree& tree() const noexcept { return tree_; }

  friend bool operator==(const CgqIndex&, const CgqIndex&) = default;

 private:
  Graph target_;
  IndexParams params_;
  NullModel null_model_;
  AssociationTable associations_;
  std::vector<NeighborhoodSummary> summaries_;
  CgqTree tree_;
};

/// Throws ValidationError on an edgeless target or invalid params.
CgqIndex build_index(Graph target, const IndexParams& params = {});

/// Binary layout: "CGQ1", u32 version, then graph, params, null model,
/// association table, summaries and tree in pre-order. Little-endian.
void write_index(std::ostream& out, const CgqIndex& index);
/// Throws FormatError on bad magic, unknown version or truncation.
CgqIndex read_index(std::istream& in);
void save_index(const CgqIndex& index, const std::filesystem::path& path);
CgqIndex load_index(const std::filesystem::path& path);

}  // namespace cgq
