#include "run_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

namespace poincare::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"bands", "bounds", "homogenize", "spectrum", "verify-laminate", "converge", "solve"};

const std::set<std::string> kKeys{"geometry", "h",        "output",    "operator",        "eta",       "grid_res",
                                  "J",        "k",        "K",         "N",               "a",         "scan",
                                  "contrast", "bc",       "boundary_width", "tolerance",  "tensor_tolerance",
                                  "n_max",    "seed",     "source",    "resolvent_check", "write_fields"};

template <typename T>
T get(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + key + "' has the wrong type");
  }
}

Point point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config: " + what + " must be a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

Conductivity conductivity(const json& j) {
  Conductivity c;
  if (j.is_number()) {
    c.value = j.get<double>();
  } else if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinite")) {
    c.infinite = true;
  } else if (j.is_array()) {
    const Point p = point(j, "complex conductivity");
    c.value = {p[0], p[1]};
  } else {
    throw ConfigError("config: a conductivity must be a number, [re, im] or \"inf\"");
  }
  if (!c.infinite && c.value == Complex(0.0)) throw ConfigError("config: conductivity a = 0 is not allowed");
  return c;
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError("config: '" + key + "' must be a non-empty list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError("config: '" + key + "' must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

SourceSpec parse_source(const json& j) {
  if (!j.is_object()) throw ConfigError("config: 'source' must be an object");
  SourceSpec s;
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "shape" && key != "value" && key != "p" && key != "q")
      throw ConfigError("config: unknown source key '" + key + "'");
  if (j.contains("kind")) {
    const auto kind = get<std::string>(j, "kind");
    if (kind == "density")
      s.kind = Source::Kind::Density;
    else if (kind == "riesz")
      s.kind = Source::Kind::Riesz;
    else
      throw ConfigError("config: source kind must be 'density' or 'riesz'");
  }
  if (j.contains("shape")) s.shape = get<std::string>(j, "shape");
  if (s.shape != "constant" && s.shape != "sine") throw ConfigError("config: source shape must be 'constant' or 'sine'");
  if (j.contains("value")) s.value = get<double>(j, "value");
  if (j.contains("p")) s.p = get<int>(j, "p");
  if (j.contains("q")) s.q = get<int>(j, "q");
  if (s.p < 1 || s.q < 1) throw ConfigError("config: source modes p, q must be >= 1");
  return s;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

Source SourceSpec::build() const {
  const double c = value;
  std::function<Complex(Point)> f;
  if (shape == "constant") {
    f = [c](Point) { return Complex(c); };
  } else {
    const int pp = p, qq = q;
    f = [c, pp, qq](Point x) { return Complex(c * std::sin(pp * kPi * x[0]) * std::sin(qq * kPi * x[1])); };
  }
  return kind == Source::Kind::Density ? Source::density(f) : Source::riesz(f);
}

CellGeometry parse_geometry(const json& g) {
  if (!g.is_object() || !g.contains("type")) throw ConfigError("config: 'geometry' needs a 'type'");
  const auto type = get<std::string>(g, "type");
  CellGeometry geom;
  if (type == "disk") {
    const Point c = g.contains("center") ? point(g.at("center"), "geometry center") : Point{0.5, 0.5};
    geom = CellGeometry::disk(c, get<double>(g, "radius"));
  } else if (type == "smoothed_square") {
    const Point c = g.contains("center") ? point(g.at("center"), "geometry center") : Point{0.5, 0.5};
    geom = CellGeometry::smoothed_square(c, get<double>(g, "half_width"), get<double>(g, "corner_radius"));
  } else if (type == "laminate") {
    geom = CellGeometry::laminate(get<double>(g, "theta"));
  } else {
    throw ConfigError("config: unknown geometry type '" + type + "'");
  }
  try {
    geom.validate();
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return geom;
}

RunConfig parse_config(const json& doc, const std::string& command) {
  if (!kCommands.count(command)) throw ConfigError("unknown command '" + command + "'");
  if (!doc.is_object() || doc.empty()) throw ConfigError("config: expected a non-empty JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");

  RunConfig c;
  c.command = command;
  require(doc.contains("geometry"), "'geometry' is required");
  c.geometry = parse_geometry(doc.at("geometry"));
  require(doc.contains("h"), "'h' is required");
  c.h = get<double>(doc, "h");
  require(c.h > 0.0 && c.h <= 0.5, "'h' must lie in (0, 0.5]");
  require(doc.contains("output"), "'output' (an existing directory) is required");
  c.output_dir = get<std::string>(doc, "output");
  require(std::filesystem::is_directory(c.output_dir), "output directory '" + c.output_dir + "' does not exist");
  require(::access(c.output_dir.c_str(), W_OK) == 0, "output directory '" + c.output_dir + "' is not writable");

  if (doc.contains("operator")) c.op = get<std::string>(doc, "operator");
  if (doc.contains("eta")) {
    const Point e = point(doc.at("eta"), "'eta'");
    c.eta = {e[0], e[1]};
    require(e[0] >= 0.0 && e[0] < 1.0 && e[1] >= 0.0 && e[1] < 1.0, "'eta' must lie in [0,1)^2");
  }
  if (doc.contains("grid_res")) c.grid_res = get<int>(doc, "grid_res");
  if (doc.contains("J")) c.J = get<int>(doc, "J");
  if (doc.contains("k")) c.k = get<int>(doc, "k");
  if (doc.contains("K")) c.K = get<int>(doc, "K");
  if (doc.contains("N")) {
    const json& n = doc.at("N");
    c.N.clear();
    if (n.is_number_integer()) {
      c.N.push_back(n.get<int>());
    } else {
      require(n.is_array() && !n.empty(), "'N' must be an integer or a non-empty list");
      for (const auto& v : n) {
        require(v.is_number_integer(), "'N' entries must be integers");
        c.N.push_back(v.get<int>());
      }
    }
    for (int v : c.N) require(v >= 1, "'N' entries must be >= 1");
  }
  if (doc.contains("a")) {
    const json& a = doc.at("a");
    // A list is always a list of entries: a single complex value is [[re, im]].
    if (a.is_array()) {
      require(!a.empty(), "'a' must not be empty");
      for (const auto& v : a) c.a.push_back(conductivity(v));
    } else {
      c.a.push_back(conductivity(a));
    }
  }
  if (doc.contains("scan")) c.scan = numbers(doc.at("scan"), "scan");
  if (doc.contains("contrast")) c.contrast = numbers(doc.at("contrast"), "contrast");
  if (doc.contains("bc")) {
    const auto bc = get<std::string>(doc, "bc");
    require(bc == "dirichlet" || bc == "periodic", "'bc' must be 'dirichlet' or 'periodic'");
    c.bc = bc == "dirichlet" ? BoundaryCondition::Dirichlet : BoundaryCondition::Periodic;
  }
  if (doc.contains("boundary_width")) {
    c.boundary_width = get<double>(doc, "boundary_width");
    require(*c.boundary_width > 0.0, "'boundary_width' must be positive");
  }
  if (doc.contains("tolerance")) c.tolerance = get<double>(doc, "tolerance");
  if (doc.contains("tensor_tolerance")) c.tensor_tolerance = get<double>(doc, "tensor_tolerance");
  require(c.tolerance > 0.0 && c.tensor_tolerance > 0.0, "tolerances must be positive");
  if (doc.contains("n_max")) c.n_max = get<int>(doc, "n_max");
  require(c.n_max >= 0, "'n_max' must be >= 0");
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("source")) c.source = parse_source(doc.at("source"));
  if (doc.contains("resolvent_check")) c.resolvent_check = get<bool>(doc, "resolvent_check");
  if (doc.contains("write_fields")) c.write_fields = get<bool>(doc, "write_fields");

  const bool curved = c.geometry.is_curved();
  if (command == "bands") {
    require(c.grid_res >= 2, "'grid_res' must be >= 2");
    require(c.J >= 1, "'J' must be >= 1");
  } else if (command == "bounds") {
    require(curved, "bounds need an inclusion strictly inside the cell (not a laminate)");
  } else if (command == "homogenize") {
    require(!c.a.empty() || !c.scan.empty(), "homogenize needs 'a' and/or 'scan'");
    for (const auto& a : c.a) require(!a.infinite, "homogenize needs finite conductivities");
  } else if (command == "spectrum") {
    static const std::set<std::string> ops{"cell", "free_cell", "bloch", "finite_dirichlet", "finite_periodic", "pack"};
    require(ops.count(c.op) > 0, "unknown operator '" + c.op + "'");
    require(c.k >= 1, "'k' must be >= 1");
    require(c.K >= 1, "'K' must be >= 1");
    require(c.op != "free_cell" || curved, "the free-cell operator needs an inclusion strictly inside the cell");
  } else if (command == "verify-laminate") {
    require(c.geometry.is_laminate(), "verify-laminate needs a laminate geometry");
    if (c.a.empty()) c.a.push_back({Complex(2.0), false});
    for (const auto& a : c.a) require(!a.infinite && a.value.imag() == 0.0, "verify-laminate needs real conductivities");
  } else if (command == "converge") {
    require(!c.a.empty() || !c.contrast.empty(), "converge needs 'a' and/or 'contrast'");
    for (const auto& a : c.a) require(!a.infinite, "converge needs finite conductivities in 'a'");
    for (double v : c.contrast) require(std::abs(v) >= 1e2, "'contrast' values need |a| >= 1e2");
    require(c.contrast.empty() || c.contrast.size() >= 2, "'contrast' needs at least two values");
  } else if (command == "solve") {
    require(!c.a.empty(), "solve needs 'a'");
    for (const auto& a : c.a)
      require(!a.infinite || c.bc == BoundaryCondition::Dirichlet, "the infinite-conductivity solve needs bc = dirichlet");
  }
  return c;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, command);
}

}  // namespace poincare::cli
