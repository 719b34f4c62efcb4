#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poincare/bloch.hpp"
#include "poincare/laminate.hpp"

using namespace poincare;

namespace {

const CellGeometry kDisk = CellGeometry::disk({0.5, 0.5}, 0.25);

void check_same_multiset(std::vector<double> a, std::vector<double> b, double tol) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

}  // namespace

TEST_CASE("eta = 0 is the cell spectrum") {
  const SpectrumResult a = bloch_spectrum_at(kDisk, {0.0, 0.0}, 1.0 / 16, 3);
  const SpectrumResult b = cell_spectrum(kDisk, 1.0 / 16, 3);
  check_same_multiset(a.nontrivial, b.nontrivial, 1e-12);
  CHECK_THROWS_AS(bloch_spectrum_at(kDisk, {1.0, 0.0}, 1.0 / 16, 3), ConfigError);
}

TEST_CASE("laminate Bloch values against the oracle") {
  const SpectrumResult r = bloch_spectrum_at(CellGeometry::laminate(0.5), {0.25, 0.5}, 1.0 / 32, 1);
  CHECK(std::abs(r.nontrivial.front() - 0.353144) < 1e-3);
  CHECK(std::abs(r.nontrivial.back() - 0.646856) < 1e-3);

  // With eta2 = 0 and eta1 != 0, the longitudinal sector adds nothing: the
  // point value 1 - theta of the cell spectrum is absent.
  const SpectrumResult s = bloch_spectrum_at(CellGeometry::laminate(0.3), {0.25, 0.0}, 1.0 / 32, 1);
  for (double v : s.nontrivial) CHECK(std::abs(v - 0.7) > 1e-3);
  const auto oracle = laminate_bloch_values(0.3, {0.25, 0.0}, 2, SectorRange::Integer);
  CHECK(std::abs(s.nontrivial.front() - oracle.front()) < 2e-3);
  CHECK(std::abs(s.nontrivial.back() - oracle.back()) < 2e-3);
}

TEST_CASE("pack spectrum is the union of Bloch spectra") {
  for (const auto& g : {CellGeometry::laminate(0.5), kDisk}) {
    const double h = 0.125;
    for (int K : {2, 3}) {
      const SpectrumResult pack = pack_spectrum(g, K, h, 1);
      const TriMesh cell = build_cell_mesh(g, h);
      std::vector<double> uni;
      int zeros = 0;
      for (int j1 = 0; j1 < K; ++j1)
        for (int j2 = 0; j2 < K; ++j2) {
          const SpectrumResult b = bloch_spectrum_at(cell, {double(j1) / K, double(j2) / K}, 1);
          uni.insert(uni.end(), b.nontrivial.begin(), b.nontrivial.end());
          zeros += b.zero_multiplicity;
        }
      check_same_multiset(pack.nontrivial, uni, 1e-6);
      CHECK(pack.zero_multiplicity == zeros);
    }
  }
}

TEST_CASE("Hermitian symmetry eta -> 1 - eta") {
  const TriMesh cell = build_cell_mesh(CellGeometry::smoothed_square({0.5, 0.45}, 0.25, 0.08), 1.0 / 16);
  for (Eta e : {Eta{0.25, 0.5}, Eta{0.1, 0.7}, Eta{0.5, 0.0}}) {
    const Eta m{e.e1 == 0 ? 0 : 1 - e.e1, e.e2 == 0 ? 0 : 1 - e.e2};
    check_same_multiset(bloch_spectrum_at(cell, e, 1).nontrivial, bloch_spectrum_at(cell, m, 1).nontrivial, 1e-9);
  }
}

TEST_CASE("band structure") {
  const double h = 1.0 / 16;
  const BandStructure b2 = band_structure(kDisk, 2, h, 1);
  REQUIRE(b2.eta_grid.size() == 4);
  const TriMesh cell = build_cell_mesh(kDisk, h);
  double lo = INFINITY, hi = -INFINITY;
  for (const Eta& e : b2.eta_grid) {
    const double v = bloch_spectrum_at(cell, e, 1).nontrivial.front();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(b2.intervals_low[0].min == lo);
  CHECK(b2.intervals_low[0].max == hi);

  // The grid of 4 is contained in the grid of 8.
  const BandStructure b4 = band_structure(kDisk, 4, h, 2);
  const BandStructure b8 = band_structure(kDisk, 8, h, 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(b8.intervals_low[j].min <= b4.intervals_low[j].min);
    CHECK(b8.intervals_low[j].max >= b4.intervals_low[j].max);
    CHECK(b8.intervals_high[j].min <= b4.intervals_high[j].min);
    CHECK(b8.intervals_high[j].max >= b4.intervals_high[j].max);
  }

  // Band values stay below the free-cell M (the lower end of the bracket
  // does not hold, see the cell-spectrum check in the spectral tests).
  CHECK(b8.bands_high.maxCoeff() <= free_cell_bounds(kDisk, h).M + 0.01);

  const BandStructure serial = band_structure_serial(kDisk, 4, h, 2);
  CHECK((serial.bands_low - b4.bands_low).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.bands_high - b4.bands_high).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laminate first band interval is symmetric about one half") {
  const BandStructure b = band_structure(CellGeometry::laminate(0.5), 4, 1.0 / 16, 1);
  CHECK(b.intervals_low[0].min + b.intervals_high[0].max == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.intervals_low[0].max + b.intervals_high[0].min == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Lipschitz modulus") {
  BandStructure flat;
  flat.grid_res = 4;
  flat.bands_low = MatrixR::Constant(1, 16, 0.3);
  flat.bands_high = MatrixR::Constant(1, 16, 0.7);
  CHECK(lipschitz_modulus(flat, 0) == 0.0);

  const double d8 = lipschitz_modulus(band_structure(kDisk, 8, 1.0 / 16, 1), 0);
  const double d16 = lipschitz_modulus(band_structure(kDisk, 16, 1.0 / 16, 1), 0);
  CHECK(d8 > 0.0);
  CHECK(d16 / d8 < 2.0);
  CHECK(d8 / d16 < 2.0);

  // The closed-form laminate band jumps at eta = 0 (to the cell value 1/2), so
  // its modulus grows with the grid; the discrete band follows it.
  for (int res : {8, 16}) {
    BandStructure exact;
    exact.grid_res = res;
    exact.bands_low.resize(1, res * res);
    exact.bands_high.resize(1, res * res);
    for (int i1 = 0; i1 < res; ++i1)
      for (int i2 = 0; i2 < res; ++i2) {
        const auto v = laminate_bloch_values(0.5, {double(i1) / res, double(i2) / res}, 4, SectorRange::Integer);
        exact.bands_low(0, i1 * res + i2) = v.front();
        exact.bands_high(0, i1 * res + i2) = v.back();
      }
    const double fem = lipschitz_modulus(band_structure(CellGeometry::laminate(0.5), res, 1.0 / 16, 1), 0);
    CHECK(fem == doctest::Approx(lipschitz_modulus(exact, 0)).epsilon(0.05));
  }
}

TEST_CASE("band csv") {
  const BandStructure b = band_structure(CellGeometry::laminate(0.5), 2, 0.125, 1);
  std::ostringstream os;
  write_band_csv(os, b);
  const std::string s = os.str();
  CHECK(s.rfind("eta1,eta2,side,j,lambda\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 4 * 2);
  const auto j = band_intervals_json(b);
  CHECK(j.size() == 2);
}
