#include "graspsim/analysis/report.hpp"

#include <cmath>
#include <stdexcept>

#include "graspsim/analysis/percentiles.hpp"
#include "graspsim/analysis/stats.hpp"

namespace graspsim::analysis {

void Table::validate() const {
  if (features.size() != feature_names.size() || metrics.size() != metric_names.size())
    throw std::invalid_argument("column names do not match columns");
  const std::size_t n = rows();
  for (const auto& c : features) {
    if (c.size() != n) throw std::invalid_argument("feature columns differ in length");
  }
  for (const auto& c : metrics) {
    if (c.size() != n) throw std::invalid_argument("metric columns differ in length");
  }
}

ImportanceTable importance_for_metric(const Table& table, std::size_t metric, const ForestOptions& options,
                                      double fraction) {
  table.validate();
  if (metric >= table.metrics.size()) throw std::out_of_range("metric index");

  std::vector<std::size_t> rows;
  std::vector<double> values;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    bool complete = std::isfinite(table.metrics[metric][i]);
    for (const auto& c : table.features) complete = complete && std::isfinite(c[i]);
    if (!complete) continue;
    rows.push_back(i);
    values.push_back(table.metrics[metric][i]);
  }
  const std::string& name = table.metric_names[metric];
  if (rows.size() < 10) throw std::invalid_argument(name + ": fewer than 10 complete rows");

  const Labeling labels = label_percentiles(values, fraction);
  if (2 * labels.per_class < kMinLabelledSamples)
    throw std::invalid_argument(name + ": " + std::to_string(2 * labels.per_class) +
                                " labelled rows, need " + std::to_string(kMinLabelledSamples));

  TrainingSet data;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (labels.labels[j] == Label::excluded) continue;
    std::vector<double> x;
    for (const auto& c : table.features) x.push_back(c[rows[j]]);
    data.x.push_back(std::move(x));
    data.y.push_back(labels.labels[j] == Label::top ? 1 : 0);
  }

  ImportanceTable out;
  out.metric = name;
  out.samples = static_cast<int>(data.x.size());
  out.degenerate = labels.degenerate;
  out.importance = RandomForest::train(data, options).importance();
  return out;
}

std::vector<std::vector<std::optional<double>>> correlation_matrix(const Table& table) {
  table.validate();
  std::vector<std::vector<std::optional<double>>> out(table.features.size());
  for (std::size_t f = 0; f < table.features.size(); ++f) {
    for (const auto& m : table.metrics) out[f].push_back(pearson_r(table.features[f], m));
  }
  return out;
}

}  // namespace graspsim::analysis
