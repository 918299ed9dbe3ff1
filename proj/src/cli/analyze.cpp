#include "graspsim/cli/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "graspsim/analysis/percentiles.hpp"

namespace graspsim::cli {

namespace fs = std::filesystem;

namespace {

std::size_t index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument(fmt::format("unknown {} '{}'", what, name));
  return static_cast<std::size_t>(it - names.begin());
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

AnalysisReport analyze_records(const std::vector<MeasurementRecord>& records, const AnalyzeOptions& options) {
  if (records.empty()) throw std::invalid_argument("dataset has no rows");
  AnalysisReport report;
  report.table = to_table(records);
  const analysis::Table& t = report.table;

  // pickup_success is binary; percentile labels would be ties only.
  for (std::size_t m = 0; m < t.metric_names.size(); ++m) {
    if (t.metric_names[m] == "pickup_success") continue;
    try {
      report.tables.push_back(analysis::importance_for_metric(t, m, options.forest, options.fraction));
    } catch (const std::invalid_argument& e) {
      report.skipped.emplace_back(t.metric_names[m], e.what());
    }
  }
  if (report.tables.empty()) {
    std::string why;
    for (const auto& [metric, reason] : report.skipped) why += "\n  " + reason;
    throw std::invalid_argument("no metric has enough labelled rows for an importance table:" + why);
  }
  report.correlations = analysis::correlation_matrix(t);

  if (options.rank_feature || options.rank_metric) {
    if (!options.rank_feature || !options.rank_metric)
      throw std::invalid_argument("rank prediction needs both a feature and a metric");
    const std::size_t f = index_of(t.feature_names, *options.rank_feature, "feature");
    const std::size_t m = index_of(t.metric_names, *options.rank_metric, "metric");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (std::isfinite(t.features[f][i]) && std::isfinite(t.metrics[m][i])) {
        x.push_back(t.features[f][i]);
        y.push_back(t.metrics[m][i]);
        report.rank_rows.push_back(i);
      }
    }
    try {
      report.rank = analysis::rank_predict(x, y, options.rank_k, std::nullopt, options.fraction);
    } catch (const analysis::UninformativeFeature& e) {
      report.rank_note = e.what();
    } catch (const std::invalid_argument& e) {
      report.rank_note = e.what();
    }
  }
  return report;
}

fs::path analyze(const fs::path& dataset, const AnalyzeOptions& options) {
  const std::vector<MeasurementRecord> records = read_dataset(dataset);
  const AnalysisReport report = analyze_records(records, options);
  const analysis::Table& t = report.table;

  // Render everything before touching the disk, so a failure leaves no partial report.
  std::ostringstream importance, correlations, labels, rank, summary;
  importance << "metric,feature,importance,std_error,most_important,samples,degenerate\n";
  for (const auto& table : report.tables) {
    for (std::size_t f = 0; f < t.feature_names.size(); ++f) {
      importance << table.metric << "," << t.feature_names[f] << "," << num(table.importance.importance[f]) << ","
                 << num(table.importance.std_error[f]) << ","
                 << (static_cast<int>(f) == table.importance.most_important ? 1 : 0) << "," << table.samples << ","
                 << (table.degenerate ? 1 : 0) << "\n";
    }
  }
  correlations << "feature";
  for (const auto& m : t.metric_names) correlations << "," << m;
  correlations << "\n";
  for (std::size_t f = 0; f < t.feature_names.size(); ++f) {
    correlations << t.feature_names[f];
    for (const auto& r : report.correlations[f]) correlations << "," << (r ? num(*r) : std::string());
    correlations << "\n";
  }
  labels << "object,youngs_modulus,grasp_id,metric,label\n";
  for (const auto& table : report.tables) {
    const std::size_t m = index_of(t.metric_names, table.metric, "metric");
    std::vector<std::size_t> rows;
    std::vector<double> values;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      bool complete = std::isfinite(t.metrics[m][i]);
      for (const auto& c : t.features) complete = complete && std::isfinite(c[i]);
      if (!complete) continue;
      rows.push_back(i);
      values.push_back(t.metrics[m][i]);
    }
    const auto l = analysis::label_percentiles(values, options.fraction);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& r = records[rows[j]];
      const char* name = l.labels[j] == analysis::Label::top      ? "top"
                         : l.labels[j] == analysis::Label::bottom ? "bottom"
                                                                  : "excluded";
      labels << r.object << "," << num(r.youngs_modulus) << "," << r.grasp_id << "," << table.metric << "," << name
             << "\n";
    }
  }
  if (report.rank) {
    rank << "feature,metric,direction,r,accuracy,predicted_top,predicted_bottom\n";
    auto ids = [&](const std::vector<int>& rows) {
      std::string s;
      for (int i : rows) {
        const auto& r = records[report.rank_rows[i]];
        s += fmt::format("{}{}:{:g}:{}", s.empty() ? "" : " ", r.object, r.youngs_modulus, r.grasp_id);
      }
      return s;
    };
    rank << *options.rank_feature << "," << *options.rank_metric << ","
         << (report.rank->direction == analysis::Direction::positive ? "positive" : "negative") << ","
         << num(report.rank->r) << "," << num(report.rank->accuracy) << "," << ids(report.rank->predicted_top) << ","
         << ids(report.rank->predicted_bottom) << "\n";
  }

  summary << "dataset: " << dataset.string() << "\nrows: " << records.size() << "\n\n";
  for (const auto& table : report.tables) {
    summary << fmt::format("{} ({} labelled rows{}): most important feature {}\n", table.metric, table.samples,
                           table.degenerate ? ", tied labels" : "",
                           t.feature_names[table.importance.most_important]);
    std::vector<std::size_t> order(t.feature_names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return table.importance.importance[a] > table.importance.importance[b];
    });
    for (std::size_t f : order)
      summary << fmt::format("  {:<22} {:.3f} +- {:.3f}\n", t.feature_names[f], table.importance.importance[f],
                             table.importance.std_error[f]);
  }
  for (const auto& [metric, reason] : report.skipped) summary << "skipped " << metric << ": " << reason << "\n";
  if (report.rank) {
    summary << fmt::format("\nrank prediction {} -> {}: R = {:.3f}, {} correlation, accuracy {:.2f}\n",
                           *options.rank_feature, *options.rank_metric, report.rank->r,
                           report.rank->direction == analysis::Direction::positive ? "positive" : "negative",
                           report.rank->accuracy);
  } else if (!report.rank_note.empty()) {
    summary << "\nrank prediction refused: " << report.rank_note << "\n";
  }

  const fs::path dir = options.output_dir.empty() ? dataset.parent_path() / "analysis" : options.output_dir;
  fs::create_directories(dir);
  auto write = [&](const char* name, const std::ostringstream& text) {
    std::ofstream out(dir / name, std::ios::trunc);
    out << text.str();
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  write("importance.csv", importance);
  write("correlations.csv", correlations);
  write("labels.csv", labels);
  if (report.rank) write("rank_prediction.csv", rank);
  write("summary.txt", summary);
  return dir;
}

}  // namespace graspsim::cli
