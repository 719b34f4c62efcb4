#include "poincare/mesh_io.hpp"

#include <fstream>

namespace poincare {

using nlohmann::json;

json mesh_to_json(const TriMesh& mesh) {
  json j;
  json nodes = json::array();
  for (const auto& p : mesh.nodes) nodes.push_back({p[0], p[1]});
  json tris = json::array();
  json tags = json::array();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    tris.push_back({tri[0], tri[1], tri[2]});
    tags.push_back(mesh.regions[t] == Region::Inclusion ? "inclusion" : "matrix");
  }
  json pairs = json::array();
  for (const auto& pp : mesh.periodic_pairs) pairs.push_back({pp.slave, pp.master, pp.wrap[0], pp.wrap[1]});
  j["nodes"] = std::move(nodes);
  j["triangles"] = std::move(tris);
  j["tags"] = std::move(tags);
  j["periodic_pairs"] = std::move(pairs);
  j["dirichlet_nodes"] = mesh.dirichlet_nodes;
  j["h"] = mesh.h;
  j["side"] = mesh.side;
  j["cells_per_side"] = mesh.cells_per_side;
  return j;
}

TriMesh mesh_from_json(const json& j) {
  TriMesh mesh;
  try {
    for (const auto& p : j.at("nodes")) mesh.nodes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& t : j.at("triangles")) mesh.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    for (const auto& tag : j.at("tags")) {
      const auto s = tag.get<std::string>();
      if (s != "inclusion" && s != "matrix") throw ConfigError("mesh JSON: unknown region tag '" + s + "'");
      mesh.regions.push_back(s == "inclusion" ? Region::Inclusion : Region::Matrix);
    }
    for (const auto& p : j.at("periodic_pairs"))
      mesh.periodic_pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>(), {p.at(2).get<int>(), p.at(3).get<int>()}});
    mesh.dirichlet_nodes = j.at("dirichlet_nodes").get<std::vector<int>>();
    mesh.h = j.at("h").get<double>();
    mesh.side = j.at("side").get<double>();
    mesh.cells_per_side = j.at("cells_per_side").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mesh JSON: ") + e.what());
  }
  if (mesh.regions.size() != mesh.triangles.size()) throw ConfigError("mesh JSON: tags and triangles differ in length");
  for (const auto& t : mesh.triangles)
    for (int v : t)
      if (v < 0 || v >= mesh.node_count()) throw ConfigError("mesh JSON: triangle references a missing node");
  return mesh;
}

namespace {
void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump() << '\n';
}
}  // namespace

void write_mesh(const std::string& path, const TriMesh& mesh) { write_json(path, mesh_to_json(mesh)); }

json field_to_json(const TriMesh& mesh, const VectorC& field) {
  if (field.size() != mesh.node_count()) throw NumericalError("field dump: size does not match the mesh");
  json j = mesh_to_json(mesh);
  json f = json::array();
  for (Eigen::Index i = 0; i < field.size(); ++i) f.push_back({field[i].real(), field[i].imag()});
  j["field"] = std::move(f);
  return j;
}

void write_field(const std::string& path, const TriMesh& mesh, const VectorC& field) {
  write_json(path, field_to_json(mesh, field));
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mesh file: ") + e.what());
  }
  return mesh_from_json(j);
}

}  // namespace poincare
