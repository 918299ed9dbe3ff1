#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspsim/analysis/forest.hpp"

namespace graspsim::analysis {

/// Column-oriented numeric data set; NaN marks an absent value.
struct Table {
  std::vector<std::string> feature_names;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> features;  // [feature][row]
  std::vector<std::vector<double>> metrics;   // [metric][row]

  std::size_t rows() const { return features.empty() ? 0 : features.front().size(); }
  /// Throws std::invalid_argument for mismatched column lengths or names.
  void validate() const;
};

inline constexpr int kMinLabelledSamples = 20;

struct ImportanceTable {
  std::string metric;
  int samples = 0;           // rows used for training (top + bottom)
  bool degenerate = false;   // ties decided the labels
  ForestImportance importance;
};

/// Labels the rows where the metric and every feature are present by
/// percentile, drops the excluded ones, and trains a forest on the rest.
/// Throws std::invalid_argument when fewer than 20 labelled rows remain or a
/// class is empty.
ImportanceTable importance_for_metric(const Table& table, std::size_t metric, const ForestOptions& options,
                                      double fraction = 0.3);

/// pearson_r of every (feature, metric) pair: [feature][metric], empty when
/// undefined.
std::vector<std::vector<std::optional<double>>> correlation_matrix(const Table& table);

}  // namespace graspsim::analysis
