#include "graspsim/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <Eigen/Geometry>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "graspsim/contact/slip_force.hpp"
#include "graspsim/fem/vtk_writer.hpp"
#include "graspsim/metrics/rigid_fit.hpp"
#include "graspsim/protocols/acceleration.hpp"
#include "graspsim/protocols/directions.hpp"
#include "graspsim/protocols/reorientation.hpp"

namespace graspsim::cli {

namespace fs = std::filesystem;

fs::path resolve_output(const fs::path& path) {
  const char* root = std::getenv(kOutputRootEnv);
  if (path.is_relative() && root && *root) return fs::path(root) / path;
  return path;
}

mesh::TetMesh build_object_mesh(const ObjectSpec& object) {
  if (object.primitive) return mesh::make_primitive(*object.primitive, object.resolution);
  return mesh::load_mesh(object.mesh_path, object.mesh_format);
}

namespace {

std::array<double, 7> pose_of(const sampler::GraspPose& g) {
  const auto gripper = contact::GripperState::from_axes(g.center, g.approach, g.roll, g.separation);
  Eigen::Quaterniond q(gripper.rotation);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {g.center.x(), g.center.y(), g.center.z(), q.w(), q.x(), q.y(), q.z()};
}

void write_snapshot(const fs::path& dir, const std::string& stem, const fem::FemModel& model,
                    const protocols::FieldSnapshot& snap, const std::vector<Vec3>& reference) {
  fem::SimState state;
  state.positions = snap.positions;
  state.element_stress = snap.stress;
  std::vector<Vec3> displacement(snap.positions.size());
  for (std::size_t i = 0; i < displacement.size(); ++i) displacement[i] = snap.positions[i] - reference[i];
  fem::write_vtk(dir / (stem + "_" + snap.label + ".vtk"), model.mesh(), snap.positions, displacement,
                 fem::von_mises_field(state), stem + " " + snap.label);
}

std::string skipped() { return "skipped"; }

}  // namespace

MeasurementRecord evaluate_grasp(const fem::FemModel& model, const std::string& object,
                                 const sampler::GraspPose& grasp, const protocols::ProtocolConfig& config,
                                 const std::optional<fs::path>& snapshot_dir) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  MeasurementRecord rec;
  rec.object = object;
  rec.youngs_modulus = model.material().youngs_modulus;
  rec.grasp_id = grasp.id;
  rec.pose = pose_of(grasp);
  rec.status.fill(skipped());

  try {
    const protocols::PickupOutcome pickup = protocols::run_pickup(model, grasp, config);
    rec.status[0] = pickup.result.status();
    if (pickup.capture) {
      const auto& cap = *pickup.capture;
      try {
        rec.features = metrics::compute_features(cap.contacts, cap.gripper, cap.center_of_mass, cap.trajectory);
        rec.features->validate(cap.gripper.max_opening);
      } catch (const metrics::FeatureError& e) {
        spdlog::debug("grasp {}: no features: {}", grasp.id, e.what());
      }
    }

    protocols::ProtocolResult reo, lin, ang;
    metrics::ProtocolResults results{&pickup.result};
    if (pickup.result.success) {
      if (config.run_linear) {
        lin = protocols::run_linear_acceleration(model, *pickup.final_world, config,
                                                 protocols::make_directions(config.acceleration_directions));
        rec.status[2] = lin.status();
        results.linear = &lin;
      }
      if (config.run_angular) {
        ang = protocols::run_angular_acceleration(model, *pickup.final_world, config,
                                                  protocols::make_directions(config.acceleration_directions));
        rec.status[3] = ang.status();
        results.angular = &ang;
      }
      if (config.run_reorientation) {
        const auto& cap = *pickup.capture;
        const auto slip =
            contact::estimate_slip_force(cap.contacts, cap.positions, cap.center_of_mass, model.total_mass(),
                                         model.material().friction, cap.gripper, config.gravity);
        reo = protocols::run_reorientation(model, grasp, config, slip.force);
        rec.status[1] = reo.status();
        results.reorientation = &reo;
      }
    }
    rec.metrics = metrics::assemble_metrics(model, results);
    rec.metrics.validate(config.linear_cap, config.angular_cap);

    if (snapshot_dir && pickup.result.success) {
      const std::string stem = fmt::format("{}_E{:g}_g{}", object, rec.youngs_modulus, grasp.id);
      const auto& rest = pickup.result.find("pre_contact")->positions;
      for (const auto& snap : pickup.result.snapshots) write_snapshot(*snapshot_dir, stem, model, snap, rest);
      // The reorientation state that set the controllability metric.
      const protocols::FieldSnapshot* worst = nullptr;
      double worst_d = -1.0;
      for (const auto& snap : reo.snapshots) {
        const double d = metrics::max_deformation(rest, snap.positions).max;
        if (d > worst_d) {
          worst_d = d;
          worst = &snap;
        }
      }
      if (worst) write_snapshot(*snapshot_dir, stem, model, *worst, rest);
    }
  } catch (const std::exception& e) {
    spdlog::error("grasp {} at E = {:g}: {}", grasp.id, rec.youngs_modulus, e.what());
    for (auto& s : rec.status) {
      if (s == skipped()) s = "fail(error)";
    }
  }
  rec.wall_time = std::chrono::duration<double>(clock::now() - start).count();
  return rec;
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = resolve_output(config.output_dir);
  fs::create_directories(dir);
  const fs::path dataset = dir / kDatasetFile;

  auto mesh = std::make_shared<const mesh::TetMesh>(build_object_mesh(config.object));
  sampler::SamplerOptions sampler_options = config.sampler;
  const std::vector<sampler::GraspPose> grasps = sampler::sample_antipodal(*mesh, sampler_options);

  std::vector<MeasurementRecord> kept;
  if (fs::exists(dataset)) {
    if (!options.resume)
      throw std::runtime_error(dataset.string() + " exists; pass --resume to continue it or choose another output");
    kept = read_dataset(dataset);
    const fs::path grasp_file = dir / kGraspsFile;
    auto same = [](const sampler::GraspPose& a, const sampler::GraspPose& b) {
      return a.id == b.id && a.center == b.center && a.approach == b.approach && a.roll == b.roll &&
             a.separation == b.separation && a.width == b.width;
    };
    if (fs::exists(grasp_file) && !std::ranges::equal(sampler::load_grasps(grasp_file.string()), grasps, same))
      throw std::runtime_error("resumed run samples a different grasp set than " + grasp_file.string());
  }
  sampler::save_grasps((dir / kGraspsFile).string(), grasps);
  {
    std::ofstream cfg(dir / kConfigFile);
    cfg << config.to_text();
  }
  std::optional<fs::path> snapshot_dir;
  if (options.snapshots) {
    snapshot_dir = dir / "snapshots";
    fs::create_directories(*snapshot_dir);
  }

  struct Task {
    std::size_t modulus;
    std::size_t grasp;
  };
  std::set<MeasurementRecord::Key> done;
  for (const auto& r : kept) done.insert(r.key());
  std::vector<Task> tasks;
  RunSummary summary;
  summary.dataset = dataset;
  for (std::size_t m = 0; m < config.moduli.size(); ++m) {
    for (std::size_t g = 0; g < grasps.size(); ++g) {
      if (done.count({config.object.name, config.moduli[m], grasps[g].id})) {
        ++summary.skipped;
        continue;
      }
      tasks.push_back({m, g});
    }
  }

  std::vector<fem::FemModel> models;
  for (double e : config.moduli) {
    mesh::MaterialParams material = config.material;
    material.youngs_modulus = e;
    models.push_back(fem::build_model(mesh, material));
  }

  // Rewrite the kept rows, then append new ones strictly in task order.
  std::ofstream out(dataset, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + dataset.string());
  out << record_header() << "\n";
  for (const auto& r : kept) out << format_record(r) << "\n";
  out.flush();

  std::mutex mutex;
  std::condition_variable ready;
  std::map<std::size_t, MeasurementRecord> finished;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      MeasurementRecord rec =
          evaluate_grasp(models[task.modulus], config.object.name, grasps[task.grasp], config.protocol, snapshot_dir);
      spdlog::info("E = {:g} grasp {}: {} ({:.1f} s)", config.moduli[task.modulus], grasps[task.grasp].id,
                   rec.status[0], rec.wall_time);
      std::lock_guard lock(mutex);
      finished.emplace(t, std::move(rec));
      ready.notify_all();
    }
  };

  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, std::max<int>(1, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return finished.count(t) > 0; });
    MeasurementRecord rec = std::move(finished.at(t));
    finished.erase(t);
    lock.unlock();
    out << format_record(rec) << "\n";
    out.flush();
    if (!out) {
      for (auto& th : pool) th.join();
      throw std::runtime_error("write failed for " + dataset.string());
    }
    ++summary.evaluated;
  }
  for (auto& th : pool) th.join();
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace graspsim::cli
