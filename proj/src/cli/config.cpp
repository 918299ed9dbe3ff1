#include "graspsim/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

namespace graspsim::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

long to_long(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) { return static_cast<int>(to_long(key, text)); }

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

std::string format_name(mesh::MeshFormat f) { return f == mesh::MeshFormat::msh ? "msh" : "node-ele"; }

struct Key {
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define GS_DOUBLE(key, field, help)                                                               \
  Key {                                                                                           \
    key, help, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(key, v); },    \
        [](const ExperimentConfig& c) { return num(c.field); }                                    \
  }
#define GS_INT(key, field, help)                                                                  \
  Key {                                                                                           \
    key, help, [](ExperimentConfig& c, const std::string& v) { c.field = to_int(key, v); },       \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                         \
  }
#define GS_BOOL(key, field, help)                                                                 \
  Key {                                                                                           \
    key, help, [](ExperimentConfig& c, const std::string& v) { c.field = to_bool(key, v); },      \
        [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); }         \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"object.name", "row key of the object; defaults to the primitive kind or mesh file stem",
       [](ExperimentConfig& c, const std::string& v) { c.object.name = trim(v); },
       [](const ExperimentConfig& c) { return c.object.name; }},
      {"object.primitive", "prism | spheroid | cylinder | cup | ring | flask",
       [](ExperimentConfig& c, const std::string& v) {
         mesh::PrimitiveSpec spec = c.object.primitive.value_or(mesh::PrimitiveSpec{});
         try {
           spec.kind = mesh::parse_primitive_kind(trim(v));
         } catch (const std::exception& e) {
           throw ConfigError(std::string("object.primitive: ") + e.what());
         }
         c.object.primitive = spec;
       },
       [](const ExperimentConfig& c) {
         return c.object.primitive ? mesh::to_string(c.object.primitive->kind) : std::string();
       }},
      {"object.dims", "comma-separated primitive dimensions, m",
       [](ExperimentConfig& c, const std::string& v) {
         mesh::PrimitiveSpec spec = c.object.primitive.value_or(mesh::PrimitiveSpec{});
         spec.dims = to_list("object.dims", v);
         c.object.primitive = spec;
       },
       [](const ExperimentConfig& c) { return c.object.primitive ? list(c.object.primitive->dims) : std::string(); }},
      GS_INT("object.resolution", object.resolution, "primitive mesh resolution (>= 1)"),
      {"object.mesh", "tetrahedral mesh file; replaces the primitive",
       [](ExperimentConfig& c, const std::string& v) {
         c.object.mesh_path = trim(v);
         c.object.primitive.reset();
       },
       [](const ExperimentConfig& c) { return c.object.mesh_path.string(); }},
      {"object.mesh_format", "node-ele | msh",
       [](ExperimentConfig& c, const std::string& v) {
         try {
           c.object.mesh_format = mesh::parse_mesh_format(trim(v));
         } catch (const std::exception& e) {
           throw ConfigError(std::string("object.mesh_format: ") + e.what());
         }
       },
       [](const ExperimentConfig& c) { return format_name(c.object.mesh_format); }},
      {"moduli", "comma-separated Young's moduli, Pa",
       [](ExperimentConfig& c, const std::string& v) { c.moduli = to_list("moduli", v); },
       [](const ExperimentConfig& c) { return list(c.moduli); }},
      GS_DOUBLE("material.density", material.density, "kg/m^3"),
      GS_DOUBLE("material.poisson", material.poisson, "Poisson ratio"),
      GS_DOUBLE("material.friction", material.friction, "Coulomb coefficient between pads and object"),
      GS_INT("grasps.count", sampler.count, "antipodal grasps per object"),
      {"grasps.seed", "sampler seed",
       [](ExperimentConfig& c, const std::string& v) {
         const long s = to_long("grasps.seed", v);
         if (s < 0) throw ConfigError("grasps.seed must be non-negative");
         c.sampler.seed = static_cast<std::uint64_t>(s);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.sampler.seed); }},
      GS_DOUBLE("grasps.max_width", sampler.max_width, "widest accepted grasp, m"),
      GS_INT("grasps.max_trials", sampler.max_trials, "sampler attempts before giving up"),
      GS_DOUBLE("protocol.dt", protocol.dt, "integration step, s"),
      GS_DOUBLE("protocol.gravity", protocol.gravity, "m/s^2"),
      GS_DOUBLE("protocol.squeeze_safety_factor", protocol.squeeze_safety_factor, "F_p = factor * m g / mu"),
      GS_DOUBLE("protocol.lowering_step", protocol.lowering_step, "platform drop per interval, m"),
      GS_DOUBLE("protocol.lowering_interval", protocol.lowering_interval, "s between platform drops"),
      GS_DOUBLE("protocol.lowering_depth", protocol.lowering_depth, "total platform drop, m"),
      GS_DOUBLE("protocol.hold_time", protocol.hold_time, "pickup hold, s"),
      GS_INT("protocol.reorientation_axes", protocol.reorientation_axes, "axes of the reorientation states"),
      {"protocol.reorientation_angles", "comma-separated rotation angles, rad",
       [](ExperimentConfig& c, const std::string& v) {
         c.protocol.reorientation_angles = to_list("protocol.reorientation_angles", v);
       },
       [](const ExperimentConfig& c) { return list(c.protocol.reorientation_angles); }},
      GS_DOUBLE("protocol.slerp_time", protocol.slerp_time, "turn duration per reorientation state, s"),
      GS_DOUBLE("protocol.settle_time", protocol.settle_time, "longest hold per reorientation state, s"),
      GS_DOUBLE("protocol.settle_speed", protocol.settle_speed, "node speed ending the hold early, m/s (0 = never)"),
      GS_INT("protocol.acceleration_directions", protocol.acceleration_directions, "directions per ramp test"),
      GS_DOUBLE("protocol.linear_jerk", protocol.linear_jerk, "m/s^3"),
      GS_DOUBLE("protocol.linear_cap", protocol.linear_cap, "m/s^2"),
      GS_DOUBLE("protocol.angular_jerk", protocol.angular_jerk, "rad/s^3"),
      GS_DOUBLE("protocol.angular_cap", protocol.angular_cap, "rad/s^2"),
      GS_DOUBLE("protocol.pre_ramp_settle", protocol.pre_ramp_settle, "zero-gravity settle before a ramp, s"),
      GS_INT("protocol.min_valid_directions", protocol.min_valid_directions, "directions a ramp test needs"),
      GS_INT("protocol.loss_debounce_steps", protocol.loss_debounce_steps, "steps without contact that count as loss"),
      GS_BOOL("protocol.run_reorientation", protocol.run_reorientation, "run the reorientation test"),
      GS_BOOL("protocol.run_linear", protocol.run_linear, "run the linear acceleration test"),
      GS_BOOL("protocol.run_angular", protocol.run_angular, "run the angular acceleration test"),
      GS_DOUBLE("contact.stiffness", protocol.contact.stiffness, "normal penalty, N/m"),
      GS_DOUBLE("contact.tangential_stiffness", protocol.contact.tangential_stiffness, "stick spring, N/m"),
      {"output.dir", "dataset directory; relative paths resolve against GRASPSIM_OUTPUT_ROOT when set",
       [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); },
       [](const ExperimentConfig& c) { return c.output_dir.string(); }},
  };
  return table;
}

#undef GS_DOUBLE
#undef GS_INT
#undef GS_BOOL

}  // namespace

void KeyValues::load(const std::string& text, const fs::path& base_dir, std::vector<fs::path>& stack,
                     const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", origin, number));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, number));
    if (key != "include") {
      values_[key] = value;
      continue;
    }
    fs::path target = value;
    if (target.is_relative()) target = base_dir / target;
    target = fs::weakly_canonical(target);
    if (std::find(stack.begin(), stack.end(), target) != stack.end())
      throw ConfigError(fmt::format("{}:{}: include cycle through {}", origin, number, target.string()));
    std::ifstream file(target);
    if (!file) throw ConfigError(fmt::format("{}:{}: cannot open {}", origin, number, target.string()));
    std::stringstream buffer;
    buffer << file.rdbuf();
    stack.push_back(target);
    load(buffer.str(), target.parent_path(), stack, target.string());
    stack.pop_back();
  }
}

KeyValues KeyValues::parse_file(const fs::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << file.rdbuf();
  KeyValues kv;
  std::vector<fs::path> stack{fs::weakly_canonical(path)};
  kv.load(buffer.str(), fs::absolute(path).parent_path(), stack, path.string());
  return kv;
}

KeyValues KeyValues::parse_string(const std::string& text, const fs::path& base_dir) {
  KeyValues kv;
  std::vector<fs::path> stack;
  kv.load(text, base_dir, stack, "<string>");
  return kv;
}

void ExperimentConfig::validate() const {
  if (moduli.empty()) throw ConfigError("moduli must list at least one Young's modulus");
  for (double e : moduli) {
    if (!(e > 0.0)) throw ConfigError("moduli must be positive");
  }
  if (!object.primitive && object.mesh_path.empty()) throw ConfigError("object needs a primitive or a mesh file");
  if (object.resolution < 1) throw ConfigError("object.resolution must be >= 1");
  if (sampler.count < 1) throw ConfigError("grasps.count must be >= 1");
  try {
    mesh::MaterialParams m = material;
    m.youngs_modulus = moduli.front();
    m.validate();
    protocol.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const Key& k : keys()) {
    const std::string v = k.get(*this);
    if (!v.empty()) out += k.name + " = " + v + "\n";
  }
  return out;
}

ExperimentConfig make_config(const KeyValues& kv) {
  ExperimentConfig c;
  c.object.primitive = mesh::PrimitiveSpec{mesh::PrimitiveKind::prism, {0.08, 0.04, 0.02}};
  // The primitive keys go first so object.mesh, applied later, can clear it.
  std::vector<std::pair<std::string, std::string>> ordered(kv.values().begin(), kv.values().end());
  auto rank = [](const std::string& key) { return key == "object.mesh" ? 1 : 0; };
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
  for (const auto& [key, value] : ordered) {
    const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) { return k.name == key; });
    if (it == keys().end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(c, value);
  }
  if (c.object.name.empty()) {
    c.object.name = c.object.primitive ? mesh::to_string(c.object.primitive->kind) : c.object.mesh_path.stem().string();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) { return make_config(KeyValues::parse_file(path)); }

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> out = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (const Key& k : keys()) v.emplace_back(k.name, k.help);
    return v;
  }();
  return out;
}

}  // namespace graspsim::cli
