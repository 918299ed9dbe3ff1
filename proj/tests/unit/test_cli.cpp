#include <gtest/gtest.h>

#include "cone_guard.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "graspsim/cli/analyze.hpp"
#include "graspsim/cli/config.hpp"
#include "graspsim/cli/experiment.hpp"
#include "graspsim/cli/record.hpp"

namespace fs = std::filesystem;
using namespace graspsim;
using namespace graspsim::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graspsim_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// A run small enough for a unit test: stiff prism, short hold, one
// reorientation state, three linear directions, no angular test.
ExperimentConfig fast_config(const fs::path& out, int grasps = 3) {
  KeyValues kv = KeyValues::parse_string(R"(
    moduli = 2e6, 2e9
    grasps.count = )" + std::to_string(grasps) + R"(
    grasps.seed = 7
    protocol.hold_time = 0.2
    protocol.lowering_depth = 0.005
    protocol.reorientation_axes = 1
    protocol.reorientation_angles = 1.5707963267948966
    protocol.slerp_time = 0.1
    protocol.settle_time = 0.1
    protocol.acceleration_directions = 3
    protocol.min_valid_directions = 1
    protocol.run_angular = false
  )");
  kv.set("output.dir", out.string());
  return make_config(kv);
}

MeasurementRecord sample_record() {
  MeasurementRecord r;
  r.object = "prism";
  r.youngs_modulus = 2e5;
  r.grasp_id = 12;
  r.pose = {0.1, -0.2, 1.0 / 3.0, 0.5, 0.5, -0.5, 0.5};
  metrics::GraspFeatures f;
  f.pure_dist = 0.1 + 1e-17;
  f.perp_dist = 1.0 / 7.0;
  f.num_contacts = 9;
  f.edge_dist = 2e-3;
  f.squeeze_dist = 0.0;
  f.gripper_sep = 0.0391;
  f.grav_align = 0.7853981633974483;
  r.features = f;
  r.metrics.pickup_success = true;
  r.metrics.max_stress = 12345.678901234567;
  r.metrics.max_deformation = 1e-300;
  r.metrics.linear_instability = 3.0;
  r.status = {"success", "skipped", "fail(insufficient)", "success"};
  r.wall_time = 0.25;
  return r;
}

}  // namespace

TEST(Config, IncludedValuesAreDefaultsThatLaterKeysOverride) {
  const fs::path dir = scratch("include");
  write_text(dir / "base.cfg", "moduli = 1e5\ngrasps.count = 9\nmaterial.friction = 0.5\n");
  fs::create_directories(dir / "sub");
  write_text(dir / "sub" / "run.cfg", "include = ../base.cfg\ngrasps.count = 4  # override\n");
  const ExperimentConfig c = load_config(dir / "sub" / "run.cfg");
  EXPECT_EQ(c.sampler.count, 4);
  EXPECT_EQ(c.moduli, std::vector<double>{1e5});
  EXPECT_DOUBLE_EQ(c.material.friction, 0.5);
  EXPECT_EQ(c.object.name, "prism");
}

TEST(Config, RejectsUnknownKeysCyclesAndBadValues) {
  EXPECT_THROW(make_config(KeyValues::parse_string("grasp.count = 3")), ConfigError);
  EXPECT_THROW(make_config(KeyValues::parse_string("grasps.count = three")), ConfigError);
  EXPECT_THROW(make_config(KeyValues::parse_string("moduli = 1e5, -1")), ConfigError);
  EXPECT_THROW(make_config(KeyValues::parse_string("protocol.dt = 0")), ConfigError);
  EXPECT_THROW(KeyValues::parse_string("no equals sign"), ConfigError);
  const fs::path dir = scratch("cycle");
  write_text(dir / "a.cfg", "include = b.cfg\n");
  write_text(dir / "b.cfg", "include = a.cfg\n");
  EXPECT_THROW(KeyValues::parse_file(dir / "a.cfg"), ConfigError);
}

TEST(Config, MeshFileReplacesThePrimitiveAndNamesTheObject) {
  const ExperimentConfig c =
      make_config(KeyValues::parse_string("object.mesh = data/cup.msh\nobject.mesh_format = msh\n"));
  EXPECT_FALSE(c.object.primitive.has_value());
  EXPECT_EQ(c.object.name, "cup");
}

TEST(Config, TextRoundTripIsExact) {
  KeyValues kv = KeyValues::parse_string(
      "object.primitive = spheroid\nobject.dims = 0.03, 0.025\nmoduli = 2e4, 123456.789\n"
      "protocol.dt = 0.000666\nprotocol.run_linear = false\nmaterial.poisson = 0.45\n");
  const ExperimentConfig a = make_config(kv);
  const ExperimentConfig b = make_config(KeyValues::parse_string(a.to_text()));
  EXPECT_EQ(a.to_text(), b.to_text());
  EXPECT_EQ(b.moduli, (std::vector<double>{2e4, 123456.789}));
  EXPECT_EQ(b.protocol.dt, 0.000666);
  EXPECT_FALSE(b.protocol.run_linear);
  // Every documented key is emitted, so the saved config is complete.
  for (const auto& [key, help] : config_keys()) {
    if (key == "object.mesh" || key == "object.name") continue;
    EXPECT_NE(a.to_text().find(key + " = "), std::string::npos) << key;
  }
}

TEST(Record, CsvRoundTripIsBitExact) {
  const MeasurementRecord r = sample_record();
  const MeasurementRecord back = parse_record(format_record(r));
  EXPECT_EQ(back, r);
  MeasurementRecord failed = r;
  failed.features.reset();
  failed.metrics = {};
  EXPECT_EQ(parse_record(format_record(failed)), failed);
  EXPECT_EQ(std::count(record_header().begin(), record_header().end(), ','), 28);
}

TEST(Record, DatasetReaderRejectsForeignHeadersAndDuplicateKeys) {
  const fs::path dir = scratch("reader");
  const MeasurementRecord r = sample_record();
  write_dataset(dir / "ok.csv", {r});
  EXPECT_EQ(read_dataset(dir / "ok.csv").size(), 1u);
  write_dataset(dir / "dup.csv", {r, r});
  EXPECT_THROW(read_dataset(dir / "dup.csv"), std::runtime_error);
  write_text(dir / "bad.csv", "object,E\n" + format_record(r) + "\n");
  EXPECT_THROW(read_dataset(dir / "bad.csv"), std::runtime_error);
  write_text(dir / "short.csv", record_header() + "\nprism,1,2\n");
  EXPECT_THROW(read_dataset(dir / "short.csv"), std::runtime_error);
}

TEST(Experiment, OutputRootResolvesRelativePathsOnly) {
  ::setenv(kOutputRootEnv, "/tmp/root", 1);
  EXPECT_EQ(resolve_output("runs/a"), fs::path("/tmp/root/runs/a"));
  EXPECT_EQ(resolve_output("/abs/a"), fs::path("/abs/a"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(resolve_output("runs/a"), fs::path("runs/a"));
}

TEST(Experiment, OneRowPerModulusAndGraspThenResumeSimulatesNothing) {
  const fs::path dir = scratch("run");
  const ExperimentConfig config = fast_config(dir);
  const RunSummary first = run_experiment(config, {.jobs = 1});
  EXPECT_EQ(first.evaluated, 6);
  const auto rows = read_dataset(first.dataset);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].youngs_modulus, config.moduli[i / 3]);
    EXPECT_EQ(rows[i].status[3], "skipped");  // angular test switched off
    EXPECT_FALSE(rows[i].metrics.angular_instability.has_value());
    if (rows[i].metrics.pickup_success) {
      EXPECT_TRUE(rows[i].features.has_value());
      EXPECT_TRUE(rows[i].metrics.max_stress.has_value());
    }
  }
  EXPECT_TRUE(fs::exists(dir / kGraspsFile));
  EXPECT_EQ(load_config(dir / kConfigFile).to_text(), config.to_text());

  EXPECT_THROW(run_experiment(config, {.jobs = 1}), std::runtime_error);  // no silent overwrite
  const std::string before = read_text(first.dataset);
  const RunSummary again = run_experiment(config, {.jobs = 1, .resume = true});
  EXPECT_EQ(again.evaluated, 0);
  EXPECT_EQ(again.skipped, 6);
  EXPECT_EQ(read_text(first.dataset), before);
}

TEST(Experiment, ResumeFinishesATruncatedRun) {
  const fs::path dir = scratch("truncated");
  const ExperimentConfig config = fast_config(dir, 2);
  run_experiment(config, {.jobs = 1});
  auto rows = read_dataset(dir / kDatasetFile);
  ASSERT_EQ(rows.size(), 4u);
  write_dataset(dir / kDatasetFile, {rows[0], rows[1]});
  const RunSummary s = run_experiment(config, {.jobs = 1, .resume = true});
  EXPECT_EQ(s.evaluated, 2);
  const auto resumed = read_dataset(dir / kDatasetFile);
  ASSERT_EQ(resumed.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    MeasurementRecord a = resumed[i], b = rows[i];
    a.wall_time = b.wall_time = 0.0;
    EXPECT_EQ(a, b) << "row " << i;
  }
}

TEST(Experiment, JobCountDoesNotChangeTheDataset) {
  const fs::path one = scratch("jobs1"), two = scratch("jobs2");
  run_experiment(fast_config(one), {.jobs = 1});
  run_experiment(fast_config(two), {.jobs = 2});
  auto a = read_dataset(one / kDatasetFile), b = read_dataset(two / kDatasetFile);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].wall_time = b[i].wall_time = 0.0;
    EXPECT_EQ(format_record(a[i]), format_record(b[i]));
  }
}

TEST(Analyze, EmptyDatasetFailsWithoutWritingAReport) {
  const fs::path dir = scratch("empty");
  write_dataset(dir / "dataset.csv", {});
  AnalyzeOptions options;
  EXPECT_THROW(analyze(dir / "dataset.csv", options), std::invalid_argument);
  EXPECT_FALSE(fs::exists(dir / "analysis"));
}

TEST(Analyze, SyntheticDatasetPointsAtTheDrivingFeature) {
  const fs::path dir = scratch("synthetic");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MeasurementRecord> rows;
  for (int i = 0; i < 40; ++i) {
    MeasurementRecord r = sample_record();
    r.grasp_id = i;
    auto& f = *r.features;
    f.pure_dist = u(rng);
    f.perp_dist = u(rng);
    f.num_contacts = std::floor(10 * u(rng));
    f.edge_dist = u(rng);
    f.squeeze_dist = u(rng);
    f.gripper_sep = u(rng);
    f.grav_align = u(rng);
    r.metrics = {};
    r.metrics.pickup_success = true;
    r.metrics.max_stress = 100.0 * f.edge_dist + 0.01 * u(rng);
    rows.push_back(r);
  }
  write_dataset(dir / "dataset.csv", rows);
  AnalyzeOptions options;
  options.forest.seed = 1;
  options.rank_feature = "edge_dist";
  options.rank_metric = "max_stress";
  const fs::path out = analyze(dir / "dataset.csv", options);
  EXPECT_EQ(out, dir / "analysis");

  const AnalysisReport report = analyze_records(rows, options);
  ASSERT_EQ(report.tables.size(), 1u);
  EXPECT_EQ(report.tables[0].metric, "max_stress");
  EXPECT_EQ(report.table.feature_names[report.tables[0].importance.most_important], "edge_dist");
  ASSERT_TRUE(report.rank.has_value());
  EXPECT_EQ(report.rank->accuracy, 1.0);
  EXPECT_EQ(report.skipped.size(), 5u);  // the other continuous metrics have no rows

  const std::string importance = read_text(out / "importance.csv");
  EXPECT_NE(importance.find("max_stress,edge_dist,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "labels.csv"));
  EXPECT_TRUE(fs::exists(out / "rank_prediction.csv"));
  EXPECT_NE(read_text(out / "summary.txt").find("most important feature edge_dist"), std::string::npos);
}

TEST(Config, ShippedDefaultsFileMatchesTheBuiltInDefaults) {
  const fs::path shipped = fs::path(GRASPSIM_SOURCE_DIR) / "configs" / "defaults.cfg";
  EXPECT_EQ(load_config(shipped).to_text(), make_config(KeyValues{}).to_text());
  for (const char* name : {"prism_desk.cfg", "quick.cfg"})
    EXPECT_NO_THROW(load_config(fs::path(GRASPSIM_SOURCE_DIR) / "configs" / name)) << name;
}
