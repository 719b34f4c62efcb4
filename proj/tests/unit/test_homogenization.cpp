#include <doctest.h>

#include <cmath>
#include <sstream>

#include "poincare/assembly.hpp"
#include "poincare/homogenization.hpp"
#include "poincare/laminate.hpp"

using namespace poincare;

namespace {

const CellGeometry kDisk = CellGeometry::disk({0.5, 0.5}, 0.25);

double max_abs(const Eigen::Matrix2cd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("homogeneous conductivity gives zero correctors and the identity") {
  for (const auto& g : {kDisk, CellGeometry::laminate(0.4)}) {
    const TriMesh cell = build_cell_mesh(g, 0.125);
    const CellSolution s = solve_cell_problems(cell, 1.0);
    CHECK(s.chi[0].cwiseAbs().maxCoeff() < 1e-14);
    CHECK(s.chi[1].cwiseAbs().maxCoeff() < 1e-14);
    CHECK(max_abs(homogenized_tensor(cell, 1.0).entries - Eigen::Matrix2cd::Identity()) < 1e-12);
  }
}

TEST_CASE("laminate correctors are piecewise linear in y1") {
  const double theta = 0.3;
  const Complex a = 2.0;
  const TriMesh cell = build_cell_mesh(CellGeometry::laminate(theta), 0.1);
  const CellSolution s = solve_cell_problems(cell, a);
  CHECK(s.chi[1].cwiseAbs().maxCoeff() < 1e-12);
  const auto [A, C] = laminate_cell_slopes(theta, a);
  // Constant gradient per region equal to the closed-form slope.
  for (int t = 0; t < cell.triangle_count(); ++t) {
    const P1Element e = p1_element(cell, t);
    Complex g1 = 0.0, g2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      g1 += s.chi[0][cell.triangles[t][k]] * e.grad[k][0];
      g2 += s.chi[0][cell.triangles[t][k]] * e.grad[k][1];
    }
    const Complex expected = cell.regions[t] == Region::Inclusion ? A : C;
    CHECK(std::abs(g1 - expected) < 1e-10);
    CHECK(std::abs(g2) < 1e-10);
  }
  CHECK(s.residuals[0] < 1e-8);
}

TEST_CASE("laminate tensor matches the closed form") {
  const TriMesh cell = build_cell_mesh(CellGeometry::laminate(0.5), 0.125);
  const HomogenizedTensor t = homogenized_tensor(cell, 2.0);
  CHECK(std::abs(t.entries(0, 0) - 4.0 / 3.0) < 1e-10);
  CHECK(std::abs(t.entries(1, 1) - 1.5) < 1e-10);
  CHECK(std::abs(t.entries(0, 1)) < 1e-12);
  CHECK(t.definiteness == Definiteness::PositiveDefinite);

  for (auto [theta, a] : {std::pair{0.3, Complex(-0.2, 0.4)}, {0.6, Complex(5.0, -1.0)}}) {
    const HomogenizedTensor c = homogenized_tensor(build_cell_mesh(CellGeometry::laminate(theta), 0.1), a);
    const LaminateTensor o = laminate_tensor(theta, a);
    CHECK(std::abs(c.entries(0, 0) - o.lambda_minus) < 1e-10);
    CHECK(std::abs(c.entries(1, 1) - o.lambda_plus) < 1e-10);
    CHECK(c.definiteness == Definiteness::Complex);
  }
}

TEST_CASE("singular and invalid conductivities") {
  const double theta = 0.4;
  const TriMesh cell = build_cell_mesh(CellGeometry::laminate(theta), 0.1);
  CHECK_THROWS_AS(solve_cell_problems(cell, -theta / (1 - theta)), NearResonanceError);
  CHECK_THROWS_AS(solve_cell_problems(cell, 0.0), ConfigError);
  CHECK_THROWS_AS(solve_cell_problems(cell, Complex(NAN, 0)), ConfigError);
}

TEST_CASE("disk tensor: symmetry and classical bounds") {
  const TriMesh cell = build_cell_mesh(kDisk, 1.0 / 16);
  const double theta = volume_fraction(cell);
  for (double a : {0.5, 1.0, 2.0}) {
    const HomogenizedTensor t = homogenized_tensor(cell, a);
    CHECK(std::abs(t.entries(0, 1) - t.entries(1, 0)) < 1e-10);
    const double lower = 1.0 / (theta / a + 1 - theta), upper = a * theta + 1 - theta;
    for (double ev : t.real_eigenvalues) {
      CHECK(ev >= lower - 1e-8);
      CHECK(ev <= upper + 1e-8);
    }
  }
  for (double a : {-1e4, -1e-4, 1e-4, 1e4}) CHECK(homogenized_tensor(cell, a).definiteness == Definiteness::PositiveDefinite);
}

TEST_CASE("tensor is continuous in a at a regular point") {
  const TriMesh cell = build_cell_mesh(kDisk, 1.0 / 16);
  const Eigen::Matrix2cd ref = homogenized_tensor(cell, -3.0).entries;
  double prev = INFINITY;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double diff = max_abs(homogenized_tensor(cell, -3.0 + d).entries - ref);
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("classify_tensor") {
  Eigen::Matrix2cd A;
  A << 1.0, 0.0, 0.0, 2.0;
  CHECK(classify_tensor(A) == Definiteness::PositiveDefinite);
  A << -1.0, 0.0, 0.0, -2.0;
  CHECK(classify_tensor(A) == Definiteness::NegativeDefinite);
  A << 1.0, 0.0, 0.0, -2.0;
  CHECK(classify_tensor(A) == Definiteness::Indefinite);
  A << 1.0, 0.0, 0.0, 1e-10;
  CHECK(classify_tensor(A) == Definiteness::Degenerate);
  A << Complex(1.0, 0.5), 0.0, 0.0, 1.0;
  CHECK(classify_tensor(A) == Definiteness::Complex);
}

TEST_CASE("exceptional set") {
  const ExceptionalSet lam = exceptional_set(CellGeometry::laminate(0.3), 0.1, 4);
  double best = INFINITY;
  for (double v : lam.values) best = std::min(best, std::abs(v + 3.0 / 7.0));
  CHECK(best < 1e-8);
  CHECK(lam.essential == -1.0);

  const ExceptionalSet disk = exceptional_set(kDisk, 1.0 / 16, 4);
  CHECK(!disk.values.empty());
  for (double v : disk.values) CHECK(v < 0.0);
}

TEST_CASE("ellipticity lower bound") {
  const double beta = ellipticity_lower_bound(kDisk, 1.0 / 16, 16);
  CHECK(beta > 0.0);
  const Eigen::Matrix2d B = matrix_energy_form(build_cell_mesh(kDisk, 1.0 / 16));
  CHECK(std::abs(B(0, 0) - B(1, 1)) < 1e-6);
  CHECK(ellipticity_lower_bound(CellGeometry::empty(), 0.125, 8) == 1.0);
  CHECK_THROWS_AS(ellipticity_lower_bound(CellGeometry::laminate(0.5), 0.125, 8), ConfigError);
}

TEST_CASE("definiteness scan on laminates") {
  const auto s1 = definiteness_scan(CellGeometry::laminate(1.0 / 3.0), {-0.25, -1.0, -0.5}, 1.0 / 12);
  CHECK(s1[0].definiteness == Definiteness::Indefinite);
  CHECK(s1[1].definiteness == Definiteness::PositiveDefinite);
  CHECK(s1[2].skipped);  // -theta/(1-theta)
  const auto s2 = definiteness_scan(CellGeometry::laminate(2.0 / 3.0), {-1.0}, 1.0 / 12);
  CHECK(s2[0].definiteness == Definiteness::NegativeDefinite);

  std::ostringstream os;
  write_scan_csv(os, s1);
  CHECK(os.str().rfind("a,lambda1,lambda2,class\n", 0) == 0);
  CHECK(os.str().find("Skipped") != std::string::npos);
}

TEST_CASE("tensor json") {
  const auto j = tensor_json(homogenized_tensor(build_cell_mesh(CellGeometry::laminate(0.5), 0.25), 2.0));
  CHECK(j.at("definiteness") == "PositiveDefinite");
  CHECK(j.at("A").size() == 2);
}
