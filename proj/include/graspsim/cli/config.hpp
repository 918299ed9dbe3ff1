#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graspsim/mesh/material.hpp"
#include "graspsim/mesh/mesh_io.hpp"
#include "graspsim/mesh/primitives.hpp"
#include "graspsim/protocols/protocol_config.hpp"
#include "graspsim/sampler/antipodal.hpp"

namespace graspsim::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. `#` starts a comment. A line `include = <path>`
/// (relative to the including file) reads that file first, as defaults:
/// keys set later, in this file, override it. Include cycles are rejected.
class KeyValues {
 public:
  static KeyValues parse_file(const std::filesystem::path& path);
  static KeyValues parse_string(const std::string& text, const std::filesystem::path& base_dir = ".");

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  void load(const std::string& text, const std::filesystem::path& base_dir, std::vector<std::filesystem::path>& stack,
            const std::string& origin);
  std::map<std::string, std::string> values_;
};

struct ObjectSpec {
  std::string name;                    // row key; defaults to the primitive or mesh file name
  std::optional<mesh::PrimitiveSpec> primitive;
  int resolution = 2;
  std::filesystem::path mesh_path;     // used when primitive is empty
  mesh::MeshFormat mesh_format = mesh::MeshFormat::node_ele;
};

struct ExperimentConfig {
  ObjectSpec object;
  std::vector<double> moduli{2e4, 2e5, 2e6, 2e9};  // Pa
  mesh::MaterialParams material;                  // youngs_modulus unused; see moduli
  sampler::SamplerOptions sampler;
  protocols::ProtocolConfig protocol;
  std::filesystem::path output_dir = "graspsim_out";

  /// Throws ConfigError for an empty modulus list or invalid constants.
  void validate() const;

  /// Every key with its current value, in the file format.
  std::string to_text() const;
};

/// Applies the key-values to a default-constructed config. Unknown keys and
/// malformed values throw ConfigError naming the key.
ExperimentConfig make_config(const KeyValues& kv);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Recognized keys with one-line descriptions, for --help and the docs.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace graspsim::cli
