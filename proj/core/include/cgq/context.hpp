#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cgq/graph.hpp"

namespace cgq {

/// Equal-frequency quantile binning of numeric features, fitted on target node values.
class Binner {
 public:
  Binner() = default;
  /// `cuts[i]` holds the strictly increasing lower bounds of bins 1.. for feature i;
  /// empty for non-numeric features.
  explicit Binner(std::vector<std::vector<double>> cuts);

  std::size_t bin_count(std::size_t feature) const { return cuts_.at(feature).size() + 1; }
  /// Values below the first cut land in bin 0, values beyond the last cut in the last bin.
  std::int32_t bin(std::size_t feature, double value) const;
  const std::vector<std::vector<double>>& cuts() const noexcept { return cuts_; }

  friend bool operator==(const Binner&, const Binner&) = default;

 private:
  std::vector<std::vector<double>> cuts_;
};

inline constexpr std::size_t kDefaultContinuousBins = 10;

Binner fit_binner(const Graph& g, std::size_t bins_continuous = kDefaultContinuousBins);

/// A node's value for one feature after discretization: bin index for numeric
/// features, the symbol (or comma-joined canonical set) otherwise.
using DiscreteValue = std::variant<std::int32_t, std::string>;

/// Unordered pair {a, b}; stored with a <= b.
class EdgePairKey {
 public:
  EdgePairKey(DiscreteValue a, DiscreteValue b);

  const DiscreteValue& first() const noexcept { return a_; }
  const DiscreteValue& second() const noexcept { return b_; }

  friend auto operator<=>(const EdgePairKey&, const EdgePairKey&) = default;
  friend bool operator==(const EdgePairKey&, const EdgePairKey&) = default;

 private:
  DiscreteValue a_;
  DiscreteValue b_;
};

std::string to_string(const DiscreteValue& value);
std::string to_string(const EdgePairKey& key);

DiscreteValue discretize(const FeatureValue& value, std::size_t feature, const Binner& binner);

EdgePairKey edge_feature_value(const Graph& g, EdgeId e, std::size_t feature, const Binner& binner);

using PairCounts = std::map<EdgePairKey, std::uint64_t>;

/// Exact multiset counts of feature-pair keys over all edges of g.
PairCounts edge_feature_counts(const Graph& g, std::size_t feature, const Binner& binner);

/// Per-feature empirical distribution of endpoint-value pairs over the target edges.
class NullModel {
 public:
  NullModel() = default;
  /// Throws std::invalid_argument when edge_count is zero or a count table does
  /// not sum to edge_count.
  NullModel(Binner binner, std::vector<PairCounts> counts, std::uint64_t edge_count);

  const Binner& binner() const noexcept { return binner_; }
  std::size_t dimension() const noexcept { return counts_.size(); }
  std::uint64_t edge_count() const noexcept { return edge_count_; }
  const PairCounts& counts(std::size_t feature) const { return counts_.at(feature); }

  /// count / |E| for observed keys, floor_probability() otherwise.
  double probability(std::size_t feature, const EdgePairKey& key) const;
  bool observed(std::size_t feature, const EdgePairKey& key) const;
  /// 1 / (2 |E|).
  double floor_probability() const noexcept { return 0.5 / static_cast<double>(edge_count_); }

  std::string to_json() const;

  friend bool operator==(const NullModel&, const NullModel&) = default;

 private:
  Binner binner_;
  std::vector<PairCounts> counts_;
  std::uint64_t edge_count_ = 0;
};

/// Throws ValidationError on an edgeless graph.
NullModel estimate_null_model(const Graph& g, Binner binner);

/// Pearson statistic over the query's observed pairs, with expectation
/// |E_q| * P_i(key).
double chi_square(const Graph& q, std::size_t feature, const NullModel& nm);

/// Chi-square from raw (observed count, probability) cells and the sample size.
struct ChiSquareCell {
  double observed = 0.0;
  double probability = 0.0;
};
double chi_square_statistic(const std::vector<ChiSquareCell>& cells, double sample_size);

/// Nonnegative feature weights summing to 1.
struct WeightVector {
  std::vector<double> w;

  std::size_t size() const noexcept { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// w_i = X_i^2 / sum_j X_j^2; uniform 1/d when every statistic is zero.
WeightVector normalize_weights(const std::vector<double>& chi_squares);

WeightVector weight_vector(const Graph& q, const NullModel& nm);

}  // namespace cgq
