#include "cgq/context.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "cgq/error.hpp"

namespace cgq {

Binner::Binner(std::vector<std::vector<double>> cuts) : cuts_(std::move(cuts)) {
  for (const auto& c : cuts_) {
    if (std::adjacent_find(c.begin(), c.end(), std::greater_equal<>()) != c.end()) {
      throw std::invalid_argument("bin boundaries must be strictly increasing");
    }
  }
}

std::int32_t Binner::bin(std::size_t feature, double value) const {
  const auto& c = cuts_.at(feature);
  return static_cast<std::int32_t>(std::upper_bound(c.begin(), c.end(), value) - c.begin());
}

Binner fit_binner(const Graph& g, std::size_t bins_continuous) {
  if (bins_continuous == 0) throw std::invalid_argument("bins_continuous must be positive");
  const auto& schema = g.schema();
  std::vector<std::vector<double>> cuts(schema.dimension());
  for (std::size_t i = 0; i < schema.dimension(); ++i) {
    if (schema[i].kind != FeatureKind::numeric || g.node_count() == 0) continue;
    std::vector<double> values;
    values.reserve(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) values.push_back(std::get<double>(g.feature(v, i)));
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    auto& c = cuts[i];
    for (std::size_t j = 1; j < bins_continuous; ++j) {
      const double cut = values[j * n / bins_continuous];
      // a cut at the minimum would leave bin 0 empty
      if (cut > values.front() && (c.empty() || cut > c.back())) c.push_back(cut);
    }
  }
  return Binner(std::move(cuts));
}

EdgePairKey::EdgePairKey(DiscreteValue a, DiscreteValue b) : a_(std::move(a)), b_(std::move(b)) {
  if (b_ < a_) std::swap(a_, b_);
}

std::string to_string(const DiscreteValue& value) {
  if (const auto* bin = std::get_if<std::int32_t>(&value)) return "bin" + std::to_string(*bin);
  return std::get<std::string>(value);
}

std::string to_string(const EdgePairKey& key) {
  return "{" + to_string(key.first()) + "|" + to_string(key.second()) + "}";
}

DiscreteValue discretize(const FeatureValue& value, std::size_t feature, const Binner& binner) {
  if (const auto* x = std::get_if<double>(&value)) return binner.bin(feature, *x);
  return format_feature_value(value);
}

EdgePairKey edge_feature_value(const Graph& g, EdgeId e, std::size_t feature, const Binner& binner) {
  const auto& edge = g.edge(e);
  return EdgePairKey(discretize(g.feature(edge.src, feature), feature, binner),
                     discretize(g.feature(edge.dst, feature), feature, binner));
}

PairCounts edge_feature_counts(const Graph& g, std::size_t feature, const Binner& binner) {
  PairCounts counts;
  for (EdgeId e = 0; e < g.edge_count(); ++e) ++counts[edge_feature_value(g, e, feature, binner)];
  return counts;
}

NullModel::NullModel(Binner binner, std::vector<PairCounts> counts, std::uint64_t edge_count)
    : binner_(std::move(binner)), counts_(std::move(counts)), edge_count_(edge_count) {
  if (edge_count_ == 0) throw std::invalid_argument("null model requires at least one target edge");
  for (const auto& table : counts_) {
    std::uint64_t total = 0;
    for (const auto& [key, n] : table) {
      if (n == 0) throw std::invalid_argument("null model counts must be positive");
      total += n;
    }
    if (total != edge_count_) throw std::invalid_argument("null model counts must sum to the edge count");
  }
}

bool NullModel::observed(std::size_t feature, const EdgePairKey& key) const {
  return counts_.at(feature).contains(key);
}

double NullModel::probability(std::size_t feature, const EdgePairKey& key) const {
  const auto& table = counts_.at(feature);
  auto it = table.find(key);
  if (it == table.end()) return floor_probability();
  return static_cast<double>(it->second) / static_cast<double>(edge_count_);
}

std::string NullModel::to_json() const {
  nlohmann::json doc;
  doc["edge_count"] = edge_count_;
  doc["floor_probability"] = floor_probability();
  doc["features"] = nlohmann::json::array();
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    nlohmann::json feature;
    feature["index"] = i;
    feature["bin_boundaries"] = binner_.cuts().at(i);
    feature["pairs"] = nlohmann::json::array();
    for (const auto& [key, n] : counts_[i]) {
      feature["pairs"].push_back({{"a", to_string(key.first())},
                                  {"b", to_string(key.second())},
                                  {"count", n},
                                  {"probability", static_cast<double>(n) / static_cast<double>(edge_count_)}});
    }
    doc["features"].push_back(std::move(feature));
  }
  return doc.dump(2);
}

NullModel estimate_null_model(const Graph& g, Binner binner) {
  if (g.edge_count() == 0) throw ValidationError("cannot estimate a null model from an edgeless graph");
  std::vector<PairCounts> counts;
  for (std::size_t i = 0; i < g.schema().dimension(); ++i) counts.push_back(edge_feature_counts(g, i, binner));
  return NullModel(std::move(binner), std::move(counts), g.edge_count());
}

double chi_square_statistic(const std::vector<ChiSquareCell>& cells, double sample_size) {
  double x2 = 0.0;
  for (const auto& cell : cells) {
    const double expected = sample_size * cell.probability;
    const double diff = cell.observed - expected;
    x2 += diff * diff / expected;
  }
  return x2;
}

double chi_square(const Graph& q, std::size_t feature, const NullModel& nm) {
  std::vector<ChiSquareCell> cells;
  for (const auto& [key, n] : edge_feature_counts(q, feature, nm.binner())) {
    cells.push_back({static_cast<double>(n), nm.probability(feature, key)});
  }
  return chi_square_statistic(cells, static_cast<double>(q.edge_count()));
}

WeightVector normalize_weights(const std::vector<double>& chi_squares) {
  WeightVector out{std::vector<double>(chi_squares.size(), 0.0)};
  if (chi_squares.empty()) return out;
  const double total = std::accumulate(chi_squares.begin(), chi_squares.end(), 0.0);
  if (!(total > 0.0)) {
    std::fill(out.w.begin(), out.w.end(), 1.0 / static_cast<double>(chi_squares.size()));
    return out;
  }
  for (std::size_t i = 0; i < chi_squares.size(); ++i) out.w[i] = chi_squares[i] / total;
  return out;
}

WeightVector weight_vector(const Graph& q, const NullModel& nm) {
  if (q.schema().dimension() != nm.dimension()) {
    throw SchemaMismatch("query dimension does not match the null model");
  }
  std::vector<double> x2(nm.dimension());
  for (std::size_t i = 0; i < x2.size(); ++i) x2[i] = chi_square(q, i, nm);
  return normalize_weights(x2);
}

}  // namespace cgq
