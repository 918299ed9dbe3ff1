#pragma once

#include <filesystem>
#include <optional>

#include "graspsim/cli/config.hpp"
#include "graspsim/cli/record.hpp"

namespace graspsim::cli {

inline constexpr const char* kOutputRootEnv = "GRASPSIM_OUTPUT_ROOT";
inline constexpr const char* kDatasetFile = "dataset.csv";
inline constexpr const char* kGraspsFile = "grasps.csv";
inline constexpr const char* kConfigFile = "config.cfg";

/// Relative paths resolve against $GRASPSIM_OUTPUT_ROOT when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& path);

/// The object mesh: the primitive, or the mesh file.
mesh::TetMesh build_object_mesh(const ObjectSpec& object);

struct RunOptions {
  int jobs = 0;  // 0 = hardware concurrency
  bool resume = false;
  bool snapshots = false;
};

struct RunSummary {
  std::filesystem::path dataset;
  int evaluated = 0;  // simulated in this run
  int skipped = 0;    // already present (resume)
  double seconds = 0.0;
};

/// Squeeze, features, the four tests and metrics for one grasp. Never
/// throws for simulation trouble: failures land in the record's statuses.
/// With `snapshot_dir`, the pickup fields are written there as VTK.
MeasurementRecord evaluate_grasp(const fem::FemModel& model, const std::string& object,
                                 const sampler::GraspPose& grasp, const protocols::ProtocolConfig& config,
                                 const std::optional<std::filesystem::path>& snapshot_dir = std::nullopt);

/// Every (modulus, grasp) pair on a worker pool. Rows reach the dataset in
/// (modulus, grasp) order whatever finishes first, and are flushed one by
/// one, so an interrupted run leaves a valid prefix. With `resume`, rows
/// already in the dataset are kept and not simulated again; without it an
/// existing dataset is an error. Writes dataset.csv, grasps.csv and the
/// effective config.cfg into the output directory.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace graspsim::cli
