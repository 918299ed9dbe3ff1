#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graspsim/analysis/report.hpp"
#include "graspsim/metrics/features.hpp"
#include "graspsim/metrics/metrics.hpp"

namespace graspsim::cli {

/// One dataset row: a grasp evaluated on one object at one modulus.
struct MeasurementRecord {
  std::string object;
  double youngs_modulus = 0.0;  // Pa
  int grasp_id = 0;
  /// Gripper center (m) and orientation quaternion (w, x, y, z) of the frame
  /// (approach, roll, approach x roll).
  std::array<double, 7> pose{};
  std::optional<metrics::GraspFeatures> features;  // empty when the squeeze failed
  metrics::GraspMetrics metrics;
  /// "success", "fail(<reason>)" or "skipped", per test in TestId order.
  std::array<std::string, 4> status;
  double wall_time = 0.0;  // s

  struct Key {
    std::string object;
    double youngs_modulus;
    int grasp_id;
    auto operator<=>(const Key&) const = default;
  };
  Key key() const { return {object, youngs_modulus, grasp_id}; }

  bool operator==(const MeasurementRecord&) const;
};

/// The fixed CSV header, comma-separated.
const std::string& record_header();

/// One CSV line without the newline. Numbers use 17 significant digits;
/// absent values are empty fields.
std::string format_record(const MeasurementRecord& record);
/// Throws std::runtime_error naming the column on malformed input.
MeasurementRecord parse_record(const std::string& line);

void write_dataset(const std::filesystem::path& path, const std::vector<MeasurementRecord>& records);
/// Throws std::runtime_error when the header differs, a row is malformed or
/// a (object, E, grasp) key repeats.
std::vector<MeasurementRecord> read_dataset(const std::filesystem::path& path);

/// Analysis table: the 7 features plus log10(E) as inputs, the 7 metrics.
analysis::Table to_table(const std::vector<MeasurementRecord>& records);

}  // namespace graspsim::cli
