#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "poincare/assembly.hpp"
#include "poincare/conductivity.hpp"
#include "poincare/homogenization.hpp"
#include "poincare/spectral.hpp"

using namespace poincare;

namespace {

const CellGeometry kDisk = CellGeometry::disk({0.5, 0.5}, 0.25);

VectorC reduced(const TriMesh& mesh, const VectorC& nodal) {
  const SparseC P = build_prolongation(mesh, std::nullopt, ConstraintKind::DirichletZero);
  return P.adjoint() * nodal;  // P is a 0/1 injection
}

// Solves the P1 system of -div(diag(l1, l2) grad u) = f on the uniform
// structured mesh of (0,1)^2 (diagonal from (i,j) to (i+1,j+1)) by a discrete
// sine transform. Returns interior nodal values, index (j-1)*(n-1) + (i-1).
VectorR dst_reference(int n, double l1, double l2, const std::function<double(double, double)>& f) {
  const int m = n - 1;
  const double h = 1.0 / n;
  auto F = [&](int i, int j) { return f(i * h, j * h); };
  // Load: consistent mass on the 7-point stencil of this triangulation.
  MatrixR b(m, m);
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i)
      b(i - 1, j - 1) = h * h / 12.0 *
                        (6 * F(i, j) + F(i + 1, j) + F(i - 1, j) + F(i, j + 1) + F(i, j - 1) + F(i + 1, j + 1) + F(i - 1, j - 1));
  MatrixR S(m, m);
  for (int p = 0; p < m; ++p)
    for (int i = 0; i < m; ++i) S(p, i) = std::sin(kPi * (p + 1) * (i + 1) / n);
  MatrixR bh = S * b * S.transpose();
  for (int q = 0; q < m; ++q)
    for (int p = 0; p < m; ++p)
      bh(p, q) /= l1 * (2 - 2 * std::cos(kPi * (p + 1) / n)) + l2 * (2 - 2 * std::cos(kPi * (q + 1) / n));
  const MatrixR u = S.transpose() * bh * S * (4.0 / (n * n));
  return u.reshaped();
}

}  // namespace

TEST_CASE("a = 1 is the Poisson problem") {
  const SolveReport r = solve_source(kDisk, 2, 1.0, Source::constant(1.0), 0.125);
  int mid = -1;
  for (int v = 0; v < r.mesh.node_count(); ++v)
    if (std::abs(r.mesh.nodes[v][0] - 0.5) < 1e-12 && std::abs(r.mesh.nodes[v][1] - 0.5) < 1e-12) mid = v;
  REQUIRE(mid >= 0);
  CHECK(r.field[mid].real() > 0.0);
  CHECK(r.residual < 1e-10);
  const VectorC poisson = solve_homogenized_on(r.mesh, Eigen::Matrix2cd::Identity(), Source::constant(1.0));
  CHECK((poisson - r.field).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("direct solve agrees with the spectral resolvent") {
  const SolveReport r = solve_source(kDisk, 2, Complex(-3.0, 0.5), Source::constant(1.0), 0.125,
                                     BoundaryCondition::Dirichlet, {true});
  REQUIRE(r.resolvent_difference.has_value());
  CHECK(*r.resolvent_difference < 1e-8);
  CHECK(r.near_resonance_exact);
}

TEST_CASE("resolvent identity against the assembled forms") {
  const TriMesh mesh = build_macro_mesh(kDisk, 2, 0.125, BoundaryCondition::Dirichlet);
  const Source f = Source::density([](Point x) { return Complex(std::sin(kPi * x[0]) + x[1]); });
  const SolveReport g = solve_source(mesh, 1.0, f);
  const FormPair p = assemble_forms(mesh, std::nullopt, ConstraintKind::DirichletZero);
  for (double a : {3.0, -5.0, 0.2}) {
    const SolveReport r = solve_source(mesh, a, f);
    const Complex lambda = 1.0 / (1.0 - a);
    const VectorC u = reduced(mesh, r.field), gr = reduced(mesh, g.field);
    const VectorC lhs = lambda * (p.den * u) - p.num * u;
    const VectorC rhs = lambda * (p.den * gr);
    CHECK((lhs - rhs).norm() < 1e-8 * rhs.norm());
    if (a > 0) CHECK(r.energy_norm <= std::max(1.0, 1.0 / a) * g.energy_norm + 1e-8);
  }
}

TEST_CASE("near-resonant conductivity is refused") {
  const TriMesh mesh = build_macro_mesh(kDisk, 2, 0.125, BoundaryCondition::Dirichlet);
  const FormPair p = assemble_forms(mesh, std::nullopt, ConstraintKind::DirichletZero);
  const FullSpectrum full = solve_gevp_full(p);
  // Pick an eigenvalue whose mode the constant source excites.
  const VectorC F = reduced(mesh, assemble_mass(mesh).cast<Complex>() * VectorC::Ones(mesh.node_count()));
  int best = -1;
  double w = 0.0;
  for (int k = 0; k < full.values.size(); ++k) {
    const double c = std::abs(full.vectors.col(k).dot(F));
    if (full.values[k] > 1e-3 && full.values[k] < 1 - 1e-3 && c > w) {
      w = c;
      best = k;
    }
  }
  REQUIRE(best >= 0);
  const double a_star = 1.0 - 1.0 / full.values[best];
  CHECK_THROWS_AS(solve_source(mesh, a_star, Source::constant(1.0)), NearResonanceError);
  CHECK_THROWS_AS(solve_source(mesh, 0.0, Source::constant(1.0)), ConfigError);
}

TEST_CASE("infinite conductivity") {
  const TriMesh mesh = build_macro_mesh(kDisk, 2, 0.125, BoundaryCondition::Dirichlet);
  const SolveReport zero = solve_infinite(mesh, Source::constant(0.0));
  CHECK(zero.field.cwiseAbs().maxCoeff() == 0.0);

  const Source f = Source::density([](Point x) { return Complex(1.0 + x[0] * x[1]); });
  const SolveReport r = solve_infinite(mesh, f);
  const auto [comp, count] = inclusion_components(mesh);
  for (int c = 0; c < count; ++c) {
    double lo = INFINITY, hi = -INFINITY;
    for (int t = 0; t < mesh.triangle_count(); ++t)
      if (comp[t] == c)
        for (int v : mesh.triangles[t]) {
          lo = std::min(lo, r.field[v].real());
          hi = std::max(hi, r.field[v].real());
        }
    CHECK(hi - lo < 1e-10);
  }

  // The projection is idempotent: feeding u_inf back as a Riesz source returns it.
  std::map<std::pair<double, double>, Complex> values;
  for (int v = 0; v < mesh.node_count(); ++v) values[{mesh.nodes[v][0], mesh.nodes[v][1]}] = r.field[v];
  const SolveReport again = solve_infinite(mesh, Source::riesz([&](Point x) { return values.at({x[0], x[1]}); }));
  CHECK((again.field - r.field).cwiseAbs().maxCoeff() < 1e-10 * r.field.cwiseAbs().maxCoeff());

  // ||u^a - u^inf|| ~ C / |a|.
  auto err = [&](double a) {
    const SolveReport s = solve_source(mesh, a, f);
    const SparseR K = assemble_stiffness(mesh, true, true);
    const VectorC d = s.field - r.field;
    return std::sqrt(d.dot(K.cast<Complex>() * d).real());
  };
  const double ratio = err(1e3) / err(1e4);
  CHECK(ratio > 7.0);
  CHECK(ratio < 13.0);
}

TEST_CASE("high-contrast rate") {
  const ContrastRate r = high_contrast_rate(kDisk, 2, Source::constant(1.0), {1e2, 1e3, 1e4}, 0.125);
  CHECK(std::abs(r.slope + 1.0) < 0.1);
  const ContrastRate z = high_contrast_rate(kDisk, 2, Source::constant(0.0), {1e2, 1e3}, 0.125);
  CHECK(z.degenerate);
}

TEST_CASE("homogenized solve") {
  Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  HomogenizedTensor t;
  t.entries = I;
  t.definiteness = Definiteness::PositiveDefinite;
  const HomogenizedSolve s = solve_homogenized(t, Source::constant(1.0), 1.0 / 16);
  CHECK(s.warnings.empty());
  CHECK(s.field.real().maxCoeff() == doctest::Approx(0.0737).epsilon(0.02));

  t.entries << 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(solve_homogenized(t, Source::constant(1.0), 0.125), NumericalError);

  // Indefinite: the solve may or may not succeed; a failure must be reported.
  t.entries << 1.0, 0.0, 0.0, -2.0;
  try {
    const HomogenizedSolve w = solve_homogenized(t, Source::constant(1.0), 0.125);
    CHECK(!w.warnings.empty());
  } catch (const NumericalError&) {
  }
}

TEST_CASE("homogenized solve matches a sine-transform reference") {
  // Manufactured solution u = sin(pi x) sin(pi y) for the laminate tensor.
  const HomogenizedTensor t = homogenized_tensor(build_cell_mesh(CellGeometry::laminate(0.5), 0.125), 2.0);
  const double l1 = t.entries(0, 0).real(), l2 = t.entries(1, 1).real();
  auto f = [&](double x, double y) { return (l1 + l2) * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y); };
  const int n = 32;
  const HomogenizedSolve s = solve_homogenized(t, Source::density([&](Point x) { return Complex(f(x[0], x[1])); }), 1.0 / n);
  const VectorR ref = dst_reference(n, l1, l2, f);
  double diff = 0.0, exact = 0.0;
  for (int v = 0; v < s.mesh.node_count(); ++v) {
    const int i = static_cast<int>(std::lround(s.mesh.nodes[v][0] * n));
    const int j = static_cast<int>(std::lround(s.mesh.nodes[v][1] * n));
    if (i == 0 || j == 0 || i == n || j == n) continue;
    diff = std::max(diff, std::abs(s.field[v] - ref[(j - 1) * (n - 1) + (i - 1)]));
    exact = std::max(exact, std::abs(s.field[v].real() - std::sin(kPi * i / n) * std::sin(kPi * j / n)));
  }
  CHECK(diff < 1e-6);
  CHECK(exact < 5e-3);
}

TEST_CASE("homogenization error decreases with eps") {
  const Source f = Source::constant(1.0);
  const auto rows = homogenization_error(kDisk, f, 2.0, {2, 4, 8}, 0.125);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].error_l2 < rows[0].error_l2);
  CHECK(rows[2].error_l2 < rows[1].error_l2);

  const auto neg = homogenization_error(kDisk, f, -1e4, {2, 4, 8}, 0.125);
  CHECK(neg[1].error_l2 < neg[0].error_l2);
  CHECK(neg[2].error_l2 < neg[1].error_l2);

  double sup2 = 0.0, sup8 = 0.0;
  for (double a : {1e2, 1e3, 1e4, -1e4}) {
    const auto r = homogenization_error(kDisk, f, a, {2, 8}, 0.125);
    sup2 = std::max(sup2, r[0].error_l2);
    sup8 = std::max(sup8, r[1].error_l2);
  }
  CHECK(sup8 < sup2);

  std::ostringstream os;
  write_error_csv(os, rows);
  CHECK(os.str().rfind("N,a_re,a_im,error_L2,error_H1,energy\n", 0) == 0);
}
