#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "poincare/conductivity.hpp"
#include "poincare/geometry.hpp"

namespace poincare::cli {

/// Right-hand side from the config: density or Riesz representative, either
/// constant or sin(p pi x) sin(q pi y).
struct SourceSpec {
  Source::Kind kind = Source::Kind::Density;
  std::string shape = "constant";
  double value = 1.0;
  int p = 1;
  int q = 1;

  Source build() const;
};

/// One conductivity entry: a complex number or the infinite-conductivity limit.
struct Conductivity {
  Complex value{1.0, 0.0};
  bool infinite = false;
};

struct RunConfig {
  std::string command;
  CellGeometry geometry;
  double h = 0.0;
  std::string output_dir;

  std::string op = "finite_dirichlet";  ///< spectrum operator
  Eta eta{0.25, 0.5};
  int grid_res = 4;
  int J = 6;
  int k = 6;
  int K = 2;
  std::vector<int> N{2};
  std::vector<Conductivity> a;
  std::vector<double> scan;
  std::vector<double> contrast;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::optional<double> boundary_width;
  double tolerance = 1e-3;
  double tensor_tolerance = 1e-8;
  int n_max = 2;
  std::uint64_t seed = 0;
  SourceSpec source;
  bool resolvent_check = false;
  bool write_fields = false;
};

/// Validates the document for `command` and throws ConfigError on any
/// problem, before anything is computed.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);

/// Reads and parses a config file.
RunConfig load_config(const std::string& path, const std::string& command);

CellGeometry parse_geometry(const nlohmann::json& g);

}  // namespace poincare::cli
