#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graspsim/analysis/ranking.hpp"
#include "graspsim/analysis/report.hpp"
#include "graspsim/cli/record.hpp"

namespace graspsim::cli {

struct AnalyzeOptions {
  std::filesystem::path output_dir;  // empty: next to the dataset
  analysis::ForestOptions forest;
  double fraction = 0.3;
  /// Optional single-feature ranking prediction.
  std::optional<std::string> rank_feature;
  std::optional<std::string> rank_metric;
  int rank_k = 5;
};

struct AnalysisReport {
  std::vector<analysis::ImportanceTable> tables;
  /// Metrics without a table, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
  analysis::Table table;
  std::vector<std::vector<std::optional<double>>> correlations;  // [feature][metric]
  std::optional<analysis::RankPrediction> rank;
  std::vector<std::size_t> rank_rows;  // dataset row of each rank_predict input
  std::string rank_note;  // why the ranking was refused, if it was
};

/// Importance tables for every metric except pickup_success that has enough
/// labelled rows, the feature-metric Pearson matrix and, when asked, a rank
/// prediction. Throws std::invalid_argument for an empty dataset or when no
/// metric yields a table.
AnalysisReport analyze_records(const std::vector<MeasurementRecord>& records, const AnalyzeOptions& options);

/// Reads the dataset, analyzes it and writes importance.csv,
/// correlations.csv, labels.csv, rank_prediction.csv (when requested) and
/// summary.txt. Nothing is written when the analysis fails. Returns the
/// output directory.
std::filesystem::path analyze(const std::filesystem::path& dataset, const AnalyzeOptions& options);

}  // namespace graspsim::cli
