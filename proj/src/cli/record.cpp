#include "graspsim/cli/record.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace graspsim::cli {

namespace {

constexpr std::array<const char*, 10> kLeadColumns{"object", "youngs_modulus", "grasp_id", "cx", "cy",
                                                   "cz",     "qw",             "qx",       "qy", "qz"};
constexpr std::array<const char*, 5> kTailColumns{"status_pickup", "status_reorient", "status_linear",
                                                  "status_angular", "wall_time"};
constexpr std::size_t kColumns = kLeadColumns.size() + 7 + 7 + kTailColumns.size();

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> header_names() {
  std::vector<std::string> names(kLeadColumns.begin(), kLeadColumns.end());
  for (const char* n : metrics::GraspFeatures::kNames) names.emplace_back(n);
  for (const char* n : metrics::GraspMetrics::kNames) names.emplace_back(n);
  names.insert(names.end(), kTailColumns.begin(), kTailColumns.end());
  return names;
}

double parse_number(const std::string& text, const std::string& column) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size())
    throw std::runtime_error("column " + column + ": bad number '" + text + "'");
  return v;
}

std::optional<double> parse_optional(const std::string& text, const std::string& column) {
  if (text.empty()) return std::nullopt;
  return parse_number(text, column);
}

}  // namespace

bool MeasurementRecord::operator==(const MeasurementRecord& o) const {
  const bool same_features = features.has_value() == o.features.has_value() &&
                             (!features || features->values() == o.features->values());
  return object == o.object && youngs_modulus == o.youngs_modulus && grasp_id == o.grasp_id && pose == o.pose &&
         same_features && metrics.values() == o.metrics.values() && status == o.status && wall_time == o.wall_time;
}

const std::string& record_header() {
  static const std::string header = [] {
    std::string h;
    for (const auto& n : header_names()) h += (h.empty() ? "" : ",") + n;
    return h;
  }();
  return header;
}

std::string format_record(const MeasurementRecord& r) {
  if (r.object.find_first_of(",\n\r\"") != std::string::npos)
    throw std::invalid_argument("object name may not contain commas, quotes or newlines");
  std::string out = r.object + "," + num(r.youngs_modulus) + "," + std::to_string(r.grasp_id);
  for (double v : r.pose) out += "," + num(v);
  for (std::size_t i = 0; i < 7; ++i) out += "," + (r.features ? num(r.features->values()[i]) : std::string());
  for (const auto& v : r.metrics.values()) out += "," + opt(v);
  for (const auto& s : r.status) out += "," + s;
  out += "," + num(r.wall_time);
  return out;
}

MeasurementRecord parse_record(const std::string& line) {
  const auto f = split(line);
  if (f.size() != kColumns)
    throw std::runtime_error(fmt::format("row has {} fields, expected {}", f.size(), kColumns));
  const auto names = header_names();
  MeasurementRecord r;
  r.object = f[0];
  r.youngs_modulus = parse_number(f[1], names[1]);
  const double id = parse_number(f[2], names[2]);
  if (id != std::floor(id)) throw std::runtime_error("column grasp_id: not an integer");
  r.grasp_id = static_cast<int>(id);
  std::size_t c = 3;
  for (double& v : r.pose) {
    v = parse_number(f[c], names[c]);
    ++c;
  }
  std::array<std::optional<double>, 7> feat;
  int present = 0;
  for (auto& v : feat) {
    v = parse_optional(f[c], names[c]);
    present += v.has_value();
    ++c;
  }
  if (present == 7) {
    metrics::GraspFeatures g;
    g.pure_dist = *feat[0];
    g.perp_dist = *feat[1];
    g.num_contacts = *feat[2];
    g.edge_dist = *feat[3];
    g.squeeze_dist = *feat[4];
    g.gripper_sep = *feat[5];
    g.grav_align = *feat[6];
    r.features = g;
  } else if (present != 0) {
    throw std::runtime_error("features must be all present or all absent");
  }
  const auto success = parse_number(f[c], names[c]);
  if (success != 0.0 && success != 1.0) throw std::runtime_error("column pickup_success: expected 0 or 1");
  r.metrics.pickup_success = success == 1.0;
  ++c;
  for (std::optional<double>* m :
       {&r.metrics.max_stress, &r.metrics.max_deformation, &r.metrics.strain_energy, &r.metrics.linear_instability,
        &r.metrics.angular_instability, &r.metrics.deformation_controllability}) {
    *m = parse_optional(f[c], names[c]);
    ++c;
  }
  for (auto& s : r.status) s = f[c++];
  r.wall_time = parse_number(f[c], names[c]);
  return r;
}

void write_dataset(const std::filesystem::path& path, const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << record_header() << "\n";
  for (const auto& r : records) out << format_record(r) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<MeasurementRecord> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != record_header())
    throw std::runtime_error(path.string() + ": header differs from the dataset format");
  std::vector<MeasurementRecord> out;
  std::set<MeasurementRecord::Key> seen;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
    if (!seen.insert(out.back().key()).second)
      throw std::runtime_error(fmt::format("{}:{}: duplicate (object, E, grasp) key", path.string(), number));
  }
  return out;
}

analysis::Table to_table(const std::vector<MeasurementRecord>& records) {
  analysis::Table t;
  for (const char* n : metrics::GraspFeatures::kNames) t.feature_names.emplace_back(n);
  t.feature_names.emplace_back("log10_youngs_modulus");
  for (const char* n : metrics::GraspMetrics::kNames) t.metric_names.emplace_back(n);
  t.features.assign(t.feature_names.size(), {});
  t.metrics.assign(t.metric_names.size(), {});
  const double absent = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    for (std::size_t i = 0; i < 7; ++i) t.features[i].push_back(r.features ? r.features->values()[i] : absent);
    t.features[7].push_back(std::log10(r.youngs_modulus));
    const auto m = r.metrics.values();
    for (std::size_t i = 0; i < m.size(); ++i) t.metrics[i].push_back(m[i].value_or(absent));
  }
  return t;
}

}  // namespace graspsim::cli
