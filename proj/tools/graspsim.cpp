// graspsim: command-line driver for grasp evaluation runs and their analysis.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "graspsim/cli/analyze.hpp"
#include "graspsim/cli/config.hpp"
#include "graspsim/cli/experiment.hpp"
#include "graspsim/fem/vtk_writer.hpp"
#include "graspsim/mesh/mesh_io.hpp"

namespace fs = std::filesystem;
using namespace graspsim;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", path, "experiment config file (key = value)")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override a config key, as key=value (repeatable)");
    app->add_option("--seed", seed, "grasp sampler seed (overrides grasps.seed)");
  }

  cli::ExperimentConfig load() const {
    cli::KeyValues kv = path.empty() ? cli::KeyValues{} : cli::KeyValues::parse_file(path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw cli::ConfigError("--set expects key=value, got '" + o + "'");
      kv.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (seed) kv.set("grasps.seed", std::to_string(*seed));
    return cli::make_config(kv);
  }
};

std::string key_list() {
  std::string out = "Config keys:\n";
  for (const auto& [key, help] : cli::config_keys()) out += fmt::format("  {:<36} {}\n", key, help);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp evaluation on deformable objects"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  // simulate
  auto* sim = app.add_subcommand("simulate", "evaluate every (modulus, grasp) pair and write dataset.csv");
  ConfigArgs sim_cfg;
  sim_cfg.attach(sim);
  cli::RunOptions run;
  std::string sim_output;
  bool list_keys = false;
  sim->add_option("-j,--jobs", run.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sim->add_flag("--snapshots", run.snapshots, "write VTK field snapshots per grasp");
  sim->add_flag("--resume", run.resume, "keep rows already in the dataset and simulate the rest");
  sim->add_option("-o,--output", sim_output, "output directory (overrides output.dir)");
  sim->add_flag("--list-keys", list_keys, "print the recognized config keys and exit");

  // analyze
  auto* ana = app.add_subcommand("analyze", "feature importance, correlations and rank prediction for a dataset");
  std::string dataset, ana_output, rank_feature, rank_metric;
  cli::AnalyzeOptions analyze_options;
  ana->add_option("dataset", dataset, "dataset.csv, or the run directory holding it")->required();
  ana->add_option("-o,--output", ana_output, "report directory (default: <dataset dir>/analysis)");
  ana->add_option("--seed", analyze_options.forest.seed, "random forest seed");
  ana->add_option("--trees", analyze_options.forest.trees, "trees per forest")->check(CLI::PositiveNumber);
  ana->add_option("--max-depth", analyze_options.forest.max_depth, "tree depth limit")->check(CLI::PositiveNumber);
  ana->add_option("-j,--jobs", analyze_options.forest.threads, "training threads (0 = all cores)");
  ana->add_option("--fraction", analyze_options.fraction, "percentile fraction per class")
      ->check(CLI::Range(0.0, 0.5));
  ana->add_option("--rank-feature", rank_feature, "feature for single-feature rank prediction");
  ana->add_option("--rank-metric", rank_metric, "metric for single-feature rank prediction");
  ana->add_option("--rank-k", analyze_options.rank_k, "grasps predicted per end")->check(CLI::PositiveNumber);

  // sample-grasps
  auto* smp = app.add_subcommand("sample-grasps", "sample antipodal grasps for the configured object");
  ConfigArgs smp_cfg;
  smp_cfg.attach(smp);
  std::string grasp_file = "grasps.csv";
  smp->add_option("-o,--output", grasp_file, "grasp CSV to write");

  // make-primitive
  auto* prim = app.add_subcommand("make-primitive", "mesh a primitive and write it as node/ele (and VTK)");
  std::string kind = "prism", stem = "object";
  std::vector<double> dims;
  int resolution = 2;
  prim->add_option("kind", kind, "prism | spheroid | cylinder | cup | ring | flask")->required();
  prim->add_option("--dims", dims, "comma-separated primitive dimensions, m")->delimiter(',')->required();
  prim->add_option("-r,--resolution", resolution, "mesh resolution")->check(CLI::PositiveNumber);
  prim->add_option("-o,--output", stem, "output stem: writes <stem>.node, <stem>.ele and <stem>.vtk");

  // export-snapshot
  auto* exp = app.add_subcommand("export-snapshot", "re-simulate one grasp of a run and write its VTK fields");
  std::string run_dir, snap_output;
  int grasp_id = 0;
  double modulus = 0.0;
  exp->add_option("run", run_dir, "run directory (holds config.cfg and grasps.csv)")
      ->required()
      ->check(CLI::ExistingDirectory);
  exp->add_option("-g,--grasp", grasp_id, "grasp id")->required();
  exp->add_option("-E,--modulus", modulus, "Young's modulus, Pa")->required()->check(CLI::PositiveNumber);
  exp->add_option("-o,--output", snap_output, "directory for the VTK files (default: <run>/snapshots)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*sim) {
      if (list_keys) {
        std::cout << key_list();
        return 0;
      }
      cli::ExperimentConfig config = sim_cfg.load();
      if (!sim_output.empty()) config.output_dir = sim_output;
      const cli::RunSummary s = cli::run_experiment(config, run);
      spdlog::info("{}: {} evaluated, {} kept from before, {:.1f} s", s.dataset.string(), s.evaluated, s.skipped,
                   s.seconds);
      std::cout << s.dataset.string() << "\n";
    } else if (*ana) {
      fs::path path = cli::resolve_output(dataset);
      if (fs::is_directory(path)) path /= cli::kDatasetFile;
      if (!ana_output.empty()) analyze_options.output_dir = cli::resolve_output(ana_output);
      if (!rank_feature.empty()) analyze_options.rank_feature = rank_feature;
      if (!rank_metric.empty()) analyze_options.rank_metric = rank_metric;
      std::cout << cli::analyze(path, analyze_options).string() << "\n";
    } else if (*smp) {
      const cli::ExperimentConfig config = smp_cfg.load();
      const mesh::TetMesh mesh = cli::build_object_mesh(config.object);
      const auto grasps = sampler::sample_antipodal(mesh, config.sampler);
      sampler::save_grasps(grasp_file, grasps);
      spdlog::info("{} grasps written to {}", grasps.size(), grasp_file);
    } else if (*prim) {
      mesh::PrimitiveSpec spec{mesh::parse_primitive_kind(kind), dims};
      const mesh::TetMesh mesh = mesh::make_primitive(spec, resolution);
      mesh::save_node_ele(mesh, stem);
      const std::vector<Vec3> zero(mesh.nodes().size(), Vec3::Zero());
      fem::write_vtk(stem + ".vtk", mesh, mesh.nodes(), zero, std::vector<double>(mesh.tets().size(), 0.0),
                     to_string(spec.kind));
      spdlog::info("{}: {} nodes, {} tets, volume {:.6g} m^3", stem, mesh.nodes().size(), mesh.tets().size(),
                   mesh.total_volume());
    } else if (*exp) {
      const fs::path dir = run_dir;
      const cli::ExperimentConfig config = cli::load_config(dir / cli::kConfigFile);
      const auto grasps = sampler::load_grasps((dir / cli::kGraspsFile).string());
      const auto it = std::find_if(grasps.begin(), grasps.end(), [&](const auto& g) { return g.id == grasp_id; });
      if (it == grasps.end()) throw std::runtime_error(fmt::format("no grasp {} in {}", grasp_id, run_dir));
      auto mesh = std::make_shared<const mesh::TetMesh>(cli::build_object_mesh(config.object));
      mesh::MaterialParams material = config.material;
      material.youngs_modulus = modulus;
      const fem::FemModel model = fem::build_model(mesh, material);
      const fs::path out = snap_output.empty() ? dir / "snapshots" : fs::path(snap_output);
      fs::create_directories(out);
      const cli::MeasurementRecord rec = cli::evaluate_grasp(model, config.object.name, *it, config.protocol, out);
      std::cout << cli::record_header() << "\n" << cli::format_record(rec) << "\n";
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
