#include "graspsim/mesh/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_map>

namespace graspsim::mesh {

namespace fs = std::filesystem;

namespace {

// Reads the next non-empty, non-comment line.
bool next_record(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void parse_error(const fs::path& path, const std::string& what) {
  throw MeshError("failed to parse " + path.string() + ": " + what);
}

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  return in;
}

std::vector<Vec3> read_node_file(const fs::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!next_record(in, line)) parse_error(path, "missing header");
  std::istringstream header(line);
  long count = -1, dim = -1;
  if (!(header >> count >> dim) || count < 0) parse_error(path, "bad header '" + line + "'");
  if (dim != 3) parse_error(path, "expected dimension 3, got " + std::to_string(dim));

  std::vector<Vec3> nodes(count);
  std::vector<bool> seen(count, false);
  for (long i = 0; i < count; ++i) {
    if (!next_record(in, line)) parse_error(path, "expected " + std::to_string(count) + " nodes");
    std::istringstream rec(line);
    long id;
    double x, y, z;
    if (!(rec >> id >> x >> y >> z)) parse_error(path, "bad node record '" + line + "'");
    if (id < 0 || id >= count || seen[id]) parse_error(path, "invalid node id " + std::to_string(id));
    seen[id] = true;
    nodes[id] = Vec3(x, y, z);
  }
  return nodes;
}

std::vector<Tet> read_ele_file(const fs::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!next_record(in, line)) parse_error(path, "missing header");
  std::istringstream header(line);
  long count = -1, arity = -1;
  if (!(header >> count >> arity) || count < 0) parse_error(path, "bad header '" + line + "'");
  if (arity != 4) parse_error(path, "expected 4 nodes per element, got " + std::to_string(arity));

  std::vector<Tet> tets(count);
  std::vector<bool> seen(count, false);
  for (long i = 0; i < count; ++i) {
    if (!next_record(in, line)) parse_error(path, "expected " + std::to_string(count) + " elements");
    std::istringstream rec(line);
    long id;
    Tet t;
    if (!(rec >> id >> t[0] >> t[1] >> t[2] >> t[3])) {
      parse_error(path, "bad element record '" + line + "'");
    }
    if (id < 0 || id >= count || seen[id]) {
      parse_error(path, "invalid element id " + std::to_string(id));
    }
    seen[id] = true;
    tets[id] = t;
  }
  return tets;
}

TetMesh load_node_ele(const fs::path& path) {
  fs::path stem = path;
  if (stem.extension() == ".node" || stem.extension() == ".ele") stem.replace_extension();
  fs::path node_path = stem, ele_path = stem;
  node_path += ".node";
  ele_path += ".ele";
  return TetMesh(read_node_file(node_path), read_ele_file(ele_path));
}

TetMesh load_msh(const fs::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  std::unordered_map<long, int> node_index;
  std::vector<Vec3> nodes;
  std::vector<Tet> tets;
  bool have_format = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "$MeshFormat") {
      if (!std::getline(in, line)) parse_error(path, "truncated $MeshFormat");
      std::istringstream rec(line);
      double version;
      int file_type;
      if (!(rec >> version >> file_type)) parse_error(path, "bad $MeshFormat");
      if (version < 2.0 || version >= 3.0) parse_error(path, "only msh v2 is supported");
      if (file_type != 0) parse_error(path, "binary msh is not supported");
      have_format = true;
    } else if (line == "$Nodes") {
      long count;
      if (!(in >> count)) parse_error(path, "bad $Nodes count");
      nodes.reserve(count);
      for (long i = 0; i < count; ++i) {
        long id;
        double x, y, z;
        if (!(in >> id >> x >> y >> z)) parse_error(path, "bad node record");
        node_index[id] = static_cast<int>(nodes.size());
        nodes.emplace_back(x, y, z);
      }
    } else if (line == "$Elements") {
      long count;
      if (!(in >> count)) parse_error(path, "bad $Elements count");
      std::getline(in, line);
      for (long i = 0; i < count; ++i) {
        if (!std::getline(in, line)) parse_error(path, "truncated $Elements");
        std::istringstream rec(line);
        long id, type, ntags;
        if (!(rec >> id >> type >> ntags)) parse_error(path, "bad element record '" + line + "'");
        for (long k = 0; k < ntags; ++k) {
          long tag;
          rec >> tag;
        }
        if (type != 4) continue;
        Tet t;
        for (int& v : t) {
          long ref;
          if (!(rec >> ref)) parse_error(path, "bad tetrahedron record '" + line + "'");
          auto it = node_index.find(ref);
          if (it == node_index.end()) parse_error(path, "unknown node id " + std::to_string(ref));
          v = it->second;
        }
        tets.push_back(t);
      }
    }
  }
  if (!have_format) parse_error(path, "missing $MeshFormat section");
  return TetMesh(std::move(nodes), std::move(tets));
}

}  // namespace

MeshFormat parse_mesh_format(const std::string& name) {
  if (name == "node-ele" || name == "node_ele") return MeshFormat::node_ele;
  if (name == "msh") return MeshFormat::msh;
  throw MeshError("unknown mesh format '" + name + "'");
}

TetMesh load_mesh(const fs::path& path, MeshFormat format) {
  switch (format) {
    case MeshFormat::node_ele:
      return load_node_ele(path);
    case MeshFormat::msh:
      return load_msh(path);
  }
  throw MeshError("unknown mesh format");
}

void save_node_ele(const TetMesh& mesh, const fs::path& stem) {
  fs::path node_path = stem, ele_path = stem;
  node_path += ".node";
  ele_path += ".ele";
  std::ofstream node_out(node_path), ele_out(ele_path);
  if (!node_out || !ele_out) throw MeshError("cannot write mesh " + stem.string());

  node_out << mesh.num_nodes() << " 3\n" << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Vec3& p = mesh.nodes()[i];
    node_out << i << ' ' << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  ele_out << mesh.num_tets() << " 4\n";
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const Tet& t = mesh.tets()[e];
    ele_out << e << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  if (!node_out || !ele_out) throw MeshError("write failed for " + stem.string());
}

}  // namespace graspsim::mesh
