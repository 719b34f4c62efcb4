#include "poincare/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace poincare {

namespace {

void check_eta(Eta eta) {
  const auto in_range = [](double e) { return e >= 0.0 && e < 1.0; };
  if (!in_range(eta.e1) || !in_range(eta.e2)) throw ConfigError("quasi-momentum must lie in [0,1)^2");
}

std::vector<Eta> uniform_grid(int res) {
  std::vector<Eta> grid;
  grid.reserve(static_cast<size_t>(res) * res);
  for (int i1 = 0; i1 < res; ++i1)
    for (int i2 = 0; i2 < res; ++i2) grid.push_back({static_cast<double>(i1) / res, static_cast<double>(i2) / res});
  return grid;
}

BandStructure collect(int res, std::vector<Eta> grid, const std::vector<std::vector<double>>& values, int J) {
  size_t available = std::numeric_limits<size_t>::max();
  for (const auto& v : values) available = std::min(available, v.size() / 2);
  if (available == 0) throw NumericalError("band structure: a grid point has fewer than two nontrivial eigenvalues");
  const int bands = std::min(J, static_cast<int>(available));
  const int G = static_cast<int>(grid.size());

  BandStructure out;
  out.grid_res = res;
  out.eta_grid = std::move(grid);
  out.bands_low.resize(bands, G);
  out.bands_high.resize(bands, G);
  for (int g = 0; g < G; ++g) {
    const auto& v = values[g];
    for (int j = 0; j < bands; ++j) {
      out.bands_low(j, g) = v[j];
      out.bands_high(j, g) = v[v.size() - 1 - j];
    }
  }
  for (int j = 0; j < bands; ++j) {
    out.intervals_low.push_back({out.bands_low.row(j).minCoeff(), out.bands_low.row(j).maxCoeff()});
    out.intervals_high.push_back({out.bands_high.row(j).minCoeff(), out.bands_high.row(j).maxCoeff()});
  }
  return out;
}

void check_band_args(int grid_res, int J) {
  if (grid_res < 2) throw ConfigError("band structure needs grid_res >= 2");
  if (J < 1) throw ConfigError("band structure needs J >= 1");
}

}  // namespace

SpectrumResult bloch_spectrum_at(const TriMesh& cell, Eta eta, int k, Exec exec, GevpMethod method) {
  check_eta(eta);
  const FormPair pair = eta.is_zero() ? assemble_forms(cell, std::nullopt, ConstraintKind::PeriodicQuotient, exec)
                                      : assemble_forms(cell, eta, ConstraintKind::QuasiPeriodic, exec);
  SpectrumResult res = solve_gevp(pair, k, k, method);
  res.label.kind = OperatorKind::Bloch;
  res.label.eta = eta;
  return res;
}

SpectrumResult bloch_spectrum_at(const CellGeometry& geom, Eta eta, double h, int k, GevpMethod method) {
  check_eta(eta);
  return bloch_spectrum_at(build_cell_mesh(geom, h), eta, k, Exec::Parallel, method);
}

BandStructure band_structure(const CellGeometry& geom, int grid_res, double h, int J, Exec exec) {
  if (exec == Exec::Serial) return band_structure_serial(geom, grid_res, h, J);
  check_band_args(grid_res, J);
  const TriMesh cell = build_cell_mesh(geom, h);
  std::vector<Eta> grid = uniform_grid(grid_res);
  const int G = static_cast<int>(grid.size());
  std::vector<std::vector<double>> values(G);
  std::vector<std::string> errors(G);
  // Exceptions cannot cross the parallel region; rethrow the first one after.
#pragma omp parallel for schedule(dynamic)
  for (int g = 0; g < G; ++g) {
    try {
      values[g] = bloch_spectrum_at(cell, grid[g], J, Exec::Serial).nontrivial;
    } catch (const std::exception& e) {
      errors[g] = e.what();
    }
  }
  for (int g = 0; g < G; ++g)
    if (!errors[g].empty()) throw NumericalError(errors[g]);
  return collect(grid_res, std::move(grid), values, J);
}

BandStructure band_structure_serial(const CellGeometry& geom, int grid_res, double h, int J) {
  check_band_args(grid_res, J);
  const TriMesh cell = build_cell_mesh(geom, h);
  std::vector<Eta> grid = uniform_grid(grid_res);
  std::vector<std::vector<double>> values;
  for (const Eta& eta : grid) values.push_back(bloch_spectrum_at(cell, eta, J, Exec::Serial).nontrivial);
  return collect(grid_res, std::move(grid), values, J);
}

double lipschitz_modulus(const BandStructure& bands, int j, BandSide side) {
  if (j < 0 || j >= bands.bands()) throw ConfigError("band index out of range");
  if (bands.grid_res < 3) throw ConfigError("Lipschitz modulus needs grid_res >= 3");
  const MatrixR& b = side == BandSide::Low ? bands.bands_low : bands.bands_high;
  const int n = bands.grid_res;
  const double step = 1.0 / n;
  double modulus = 0.0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const double v = b(j, i1 * n + i2);
      modulus = std::max(modulus, std::abs(v - b(j, ((i1 + 1) % n) * n + i2)) / step);
      modulus = std::max(modulus, std::abs(v - b(j, i1 * n + (i2 + 1) % n)) / step);
    }
  return modulus;
}

void write_band_csv(std::ostream& out, const BandStructure& bands) {
  out << "eta1,eta2,side,j,lambda\n";
  out.precision(15);
  for (size_t g = 0; g < bands.eta_grid.size(); ++g)
    for (int side = 0; side < 2; ++side)
      for (int j = 0; j < bands.bands(); ++j) {
        const MatrixR& b = side == 0 ? bands.bands_low : bands.bands_high;
        out << bands.eta_grid[g].e1 << ',' << bands.eta_grid[g].e2 << ',' << (side == 0 ? "low" : "high") << ','
            << j + 1 << ',' << b(j, static_cast<Eigen::Index>(g)) << '\n';
      }
}

nlohmann::json band_intervals_json(const BandStructure& bands) {
  nlohmann::json out = nlohmann::json::array();
  for (int side = 0; side < 2; ++side)
    for (int j = 0; j < bands.bands(); ++j) {
      const BandInterval& iv = side == 0 ? bands.intervals_low[j] : bands.intervals_high[j];
      out.push_back({{"j", j + 1}, {"side", side == 0 ? "low" : "high"}, {"min", iv.min}, {"max", iv.max}});
    }
  return out;
}

}  // namespace poincare
