#pragma once

#include <ostream>
#include <vector>

#include <json.hpp>

#include "poincare/spectral.hpp"

namespace poincare {

/// Spectrum of T_eta on the cell: quasi-periodic constraints for eta != 0,
/// periodic quotient by constants at eta = 0.
SpectrumResult bloch_spectrum_at(const CellGeometry& geom, Eta eta, double h, int k,
                                 GevpMethod method = GevpMethod::Auto);

/// Same on an existing cell mesh (reused across a quasi-momentum grid).
SpectrumResult bloch_spectrum_at(const TriMesh& cell, Eta eta, int k, Exec exec = Exec::Parallel,
                                 GevpMethod method = GevpMethod::Auto);

enum class BandSide { Low, High };

struct BandInterval {
  double min = 0.0;
  double max = 0.0;
};

struct BandStructure {
  int grid_res = 0;
  /// Grid point g = i1 * grid_res + i2 sits at (i1, i2) / grid_res.
  std::vector<Eta> eta_grid;
  /// J x grid: bands_low(j, g) is the (j+1)-th smallest nontrivial value,
  /// bands_high(j, g) the (j+1)-th largest.
  MatrixR bands_low;
  MatrixR bands_high;
  std::vector<BandInterval> intervals_low;
  std::vector<BandInterval> intervals_high;

  int bands() const { return static_cast<int>(bands_low.rows()); }
};

/// Bands on the uniform grid_res x grid_res quasi-momentum grid. J is capped
/// by the smallest number of nontrivial values found at any grid point.
BandStructure band_structure(const CellGeometry& geom, int grid_res, double h, int J, Exec exec = Exec::Parallel);

/// Serial reference for band_structure (same results, one point at a time).
BandStructure band_structure_serial(const CellGeometry& geom, int grid_res, double h, int J);

/// Largest difference quotient of band j between grid neighbours (periodic
/// wrap included).
double lipschitz_modulus(const BandStructure& bands, int j, BandSide side = BandSide::Low);

/// CSV rows "eta1,eta2,side,j,lambda" (j is 1-based).
void write_band_csv(std::ostream& out, const BandStructure& bands);

/// [{j, side, min, max}, ...]
nlohmann::json band_intervals_json(const BandStructure& bands);

}  // namespace poincare
