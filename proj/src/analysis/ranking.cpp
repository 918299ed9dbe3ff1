#include "graspsim/analysis/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graspsim/analysis/percentiles.hpp"
#include "graspsim/analysis/stats.hpp"

namespace graspsim::analysis {

UninformativeFeature::UninformativeFeature(double r)
    : std::runtime_error("feature is uninformative for this metric (|R| = " + std::to_string(std::abs(r)) + ")"),
      r_(r) {}

RankPrediction rank_predict(const std::vector<double>& feature, const std::vector<double>& metric, int k,
                            std::optional<Direction> direction, double fraction) {
  const std::size_t n = feature.size();
  if (metric.size() != n) throw std::invalid_argument("feature and metric columns differ in length");
  if (n < 20) throw std::invalid_argument("rank prediction needs at least 20 grasps");
  if (k < 1 || 2 * static_cast<std::size_t>(k) > n) throw std::invalid_argument("k must satisfy 1 <= 2k <= n");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(feature[i]) || !std::isfinite(metric[i]))
      throw std::invalid_argument("rank prediction needs finite values");
  }

  const std::optional<double> r = pearson_r(feature, metric);
  if (!r || std::abs(*r) < kMinAbsCorrelation) throw UninformativeFeature(r.value_or(0.0));

  RankPrediction out;
  out.r = *r;
  out.direction = direction.value_or(*r >= 0.0 ? Direction::positive : Direction::negative);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return feature[a] < feature[b]; });
  std::vector<int> high(order.rbegin(), order.rbegin() + k);
  std::vector<int> low(order.begin(), order.begin() + k);
  if (out.direction == Direction::positive) {
    out.predicted_top = std::move(high);
    out.predicted_bottom = std::move(low);
  } else {
    out.predicted_top = std::move(low);
    out.predicted_bottom = std::move(high);
  }

  const Labeling labels = label_percentiles(metric, fraction);
  int hits = 0;
  for (int i : out.predicted_top) hits += labels.labels[i] == Label::top;
  for (int i : out.predicted_bottom) hits += labels.labels[i] == Label::bottom;
  out.accuracy = static_cast<double>(hits) / (2.0 * k);
  return out;
}

}  // namespace graspsim::analysis
