#include "poincare/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "poincare/assembly.hpp"
#include "poincare/spectral.hpp"
#include "sparse_solve.hpp"

namespace poincare {

namespace {

/// Reduced periodic operators of the cell.
struct CellOperators {
  SparseC P;        // nodes x dofs
  SparseC K_inc;    // inclusion stiffness
  SparseC K_mat;    // matrix stiffness
  VectorC weight;   // P^H M 1
  std::array<VectorC, 2> g_inc;  // int_omega e_i . grad phi
  std::array<VectorC, 2> g_mat;  // int_{Y \ omega} e_i . grad phi
};

CellOperators cell_operators(const TriMesh& cell) {
  CellOperators op;
  op.P = build_prolongation(cell, std::nullopt, ConstraintKind::PeriodicQuotient);
  const SparseC PH = op.P.adjoint();
  op.K_inc = PH * assemble_stiffness(cell, true, false).cast<Complex>() * op.P;
  op.K_mat = PH * assemble_stiffness(cell, false, true).cast<Complex>() * op.P;
  const VectorR ones = VectorR::Ones(cell.node_count());
  op.weight = PH * (assemble_mass(cell) * ones).cast<Complex>();
  std::array<VectorR, 2> gi{VectorR::Zero(cell.node_count()), VectorR::Zero(cell.node_count())};
  std::array<VectorR, 2> gm = gi;
  for (int t = 0; t < cell.triangle_count(); ++t) {
    const P1Element e = p1_element(cell, t);
    auto& g = cell.regions[t] == Region::Inclusion ? gi : gm;
    for (int v = 0; v < 3; ++v)
      for (int i = 0; i < 2; ++i) g[i][cell.triangles[t][v]] += e.area * e.grad[v][i];
  }
  for (int i = 0; i < 2; ++i) {
    op.g_inc[i] = PH * gi[i].cast<Complex>();
    op.g_mat[i] = PH * gm[i].cast<Complex>();
  }
  return op;
}

Complex energy(const SparseC& K, const VectorC& x) { return x.dot(K * x); }

}  // namespace

CellSolution solve_cell_problems(const TriMesh& cell, Complex a) {
  if (a == Complex(0.0)) throw ConfigError("conductivity a must be nonzero");
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ConfigError("conductivity a must be finite");
  const CellOperators op = cell_operators(cell);

  CellSolution sol;
  sol.a = a;
  // Periodicity removes int_Y e_i . grad phi, leaving b_i = (1 - a) int_omega.
  std::vector<VectorC> rhs{(1.0 - a) * op.g_inc[0], (1.0 - a) * op.g_inc[1]};
  const double b_norm = std::max(rhs[0].norm(), rhs[1].norm());
  if (b_norm == 0.0 || cell.triangle_count() == 0) {
    for (int i = 0; i < 2; ++i) sol.chi[i] = VectorC::Zero(cell.node_count());
    sol.excited_distance = std::numeric_limits<double>::infinity();
    return sol;
  }

  const SparseC K = a * op.K_inc + op.K_mat;
  const SparseC KY = op.K_inc + op.K_mat;
  std::vector<VectorC> chi, z;
  if (!detail::lu_solve(K, op.weight, rhs, chi))
    throw NearResonanceError("cell problem is singular at this conductivity", 0.0, false);
  if (!detail::lu_solve(KY, op.weight, rhs, z)) throw NumericalError("cell stiffness factorization failed");

  double distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const double bz = std::abs(rhs[i].dot(z[i]));
    const double xx = std::abs(energy(KY, chi[i]));
    if (rhs[i].norm() < 1e-12 * b_norm || xx == 0.0) continue;
    distance = std::min(distance, std::abs(1.0 - a) * std::sqrt(bz / xx));
  }
  sol.excited_distance = distance;
  if (distance < kCellSingularDistance)
  {
    std::ostringstream os;
    os << "cell problem is singular: a is within " << distance << " of an exceptional value";
    throw NearResonanceError(os.str(), distance, false);
  }

  for (int i = 0; i < 2; ++i) {
    // Relative to the larger right-hand side: one of them may vanish up to
    // rounding (laminates).
    sol.residuals[i] = (K * chi[i] - rhs[i]).norm() / b_norm;
    if (!(sol.residuals[i] < 1e-8)) {
      std::ostringstream os;
      os << "cell problem residual " << sol.residuals[i] << " exceeds 1e-8";
      throw NumericalError(os.str());
    }
    sol.chi[i] = op.P * chi[i];
  }
  return sol;
}

CellSolution solve_cell_problems(const CellGeometry& geom, Complex a, double h) {
  return solve_cell_problems(build_cell_mesh(geom, h), a);
}

Eigen::Matrix2cd tensor_from_correctors(const TriMesh& cell, const CellSolution& sol) {
  Eigen::Matrix2cd A = Eigen::Matrix2cd::Zero();
  for (int t = 0; t < cell.triangle_count(); ++t) {
    const P1Element e = p1_element(cell, t);
    const Complex coef = cell.regions[t] == Region::Inclusion ? sol.a : Complex(1.0);
    std::array<Eigen::Vector2cd, 2> f;
    for (int i = 0; i < 2; ++i) {
      f[i] = Eigen::Vector2cd::Zero();
      f[i][i] = 1.0;
      for (int v = 0; v < 3; ++v) {
        const Complex c = sol.chi[i][cell.triangles[t][v]];
        f[i][0] += c * e.grad[v][0];
        f[i][1] += c * e.grad[v][1];
      }
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) A(i, j) += coef * e.area * (f[i][0] * f[j][0] + f[i][1] * f[j][1]);
  }
  return A;
}

Definiteness classify_tensor(const Eigen::Matrix2cd& A, std::array<double, 2>* real_eigenvalues) {
  const Eigen::Matrix2d R = 0.5 * (A.real() + A.real().transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(R);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (real_eigenvalues) *real_eigenvalues = {ev[0], ev[1]};
  const double scale = A.norm();
  if (scale == 0.0) return Definiteness::Degenerate;
  if (A.imag().norm() > 1e-10 * scale) return Definiteness::Complex;
  const double tol = 1e-8 * scale;
  if (std::abs(ev[0]) < tol || std::abs(ev[1]) < tol) return Definiteness::Degenerate;
  if (ev[0] > 0.0) return Definiteness::PositiveDefinite;
  if (ev[1] < 0.0) return Definiteness::NegativeDefinite;
  return Definiteness::Indefinite;
}

HomogenizedTensor homogenized_tensor(const TriMesh& cell, Complex a) {
  const CellSolution sol = solve_cell_problems(cell, a);
  HomogenizedTensor out;
  out.a = a;
  out.entries = tensor_from_correctors(cell, sol);
  out.residuals = sol.residuals;
  out.definiteness = classify_tensor(out.entries, &out.real_eigenvalues);
  return out;
}

HomogenizedTensor homogenized_tensor(const CellGeometry& geom, Complex a, double h) {
  return homogenized_tensor(build_cell_mesh(geom, h), a);
}

ExceptionalSet exceptional_set(const CellGeometry& geom, double h, int k) {
  if (k < 1) throw ConfigError("exceptional set needs k >= 1");
  const SpectrumResult res = cell_spectrum(geom, h, k);
  ExceptionalSet out;
  for (double lambda : res.eigenvalues) out.values.push_back(1.0 - 1.0 / lambda);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

Eigen::Matrix2d matrix_energy_form(const TriMesh& cell) {
  const CellOperators op = cell_operators(cell);
  // Keep the dofs touched by matrix triangles; the rest do not enter the form.
  std::vector<int> keep, index(op.K_mat.rows(), -1);
  const VectorC diag = op.K_mat.diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (diag[i].real() > 0.0) {
      index[i] = static_cast<int>(keep.size());
      keep.push_back(static_cast<int>(i));
    }
  const int n = static_cast<int>(keep.size());
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index c = 0; c < op.K_mat.outerSize(); ++c)
    for (SparseC::InnerIterator it(op.K_mat, c); it; ++it)
      if (index[it.row()] >= 0 && index[it.col()] >= 0) trips.emplace_back(index[it.row()], index[it.col()], it.value());
  SparseC K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  std::vector<VectorC> rhs(2, VectorC(n));
  for (int i = 0; i < 2; ++i)
    for (int r = 0; r < n; ++r) rhs[i][r] = -op.g_mat[i][keep[r]];
  std::vector<VectorC> w;
  if (!detail::lu_solve(K, VectorC::Ones(n), rhs, w))
    throw GeometryError("matrix-region Neumann problem is singular (matrix region disconnected)");

  CellSolution sol;
  sol.a = 0.0;  // inclusion triangles drop out of the energy
  for (int i = 0; i < 2; ++i) {
    VectorC reduced = VectorC::Zero(op.K_mat.rows());
    for (int r = 0; r < n; ++r) reduced[keep[r]] = w[i][r];
    sol.chi[i] = op.P * reduced;
  }
  return tensor_from_correctors(cell, sol).real();
}

double ellipticity_lower_bound(const CellGeometry& geom, double h, int directions) {
  if (geom.is_laminate()) throw ConfigError("ellipticity bound needs an inclusion strictly inside the cell");
  if (directions < 1) throw ConfigError("ellipticity bound needs at least one direction");
  if (geom.is_empty()) return 1.0;
  const Eigen::Matrix2d B = matrix_energy_form(build_cell_mesh(geom, h));
  double beta = std::numeric_limits<double>::infinity();
  for (int s = 0; s < directions; ++s) {
    const double phi = kPi * s / directions;
    const Eigen::Vector2d xi(std::cos(phi), std::sin(phi));
    beta = std::min(beta, xi.dot(B * xi));
  }
  if (!(beta > 1e-8)) throw GeometryError("ellipticity lower bound vanishes (matrix region disconnected)");
  return beta;
}

std::vector<ScanEntry> definiteness_scan(const CellGeometry& geom, const std::vector<double>& a_values, double h) {
  const TriMesh cell = build_cell_mesh(geom, h);
  std::vector<ScanEntry> out;
  for (double a : a_values) {
    ScanEntry e;
    e.a = a;
    try {
      const HomogenizedTensor t = homogenized_tensor(cell, a);
      e.eigenvalues = t.real_eigenvalues;
      e.definiteness = t.definiteness;
    } catch (const NearResonanceError&) {
      e.skipped = true;
      e.eigenvalues = {std::nan(""), std::nan("")};
    }
    out.push_back(e);
  }
  return out;
}

nlohmann::json tensor_json(const HomogenizedTensor& t) {
  nlohmann::json A = nlohmann::json::array(), A_im = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    A.push_back({t.entries(i, 0).real(), t.entries(i, 1).real()});
    A_im.push_back({t.entries(i, 0).imag(), t.entries(i, 1).imag()});
  }
  return {{"a_re", t.a.real()},
          {"a_im", t.a.imag()},
          {"A", A},
          {"A_im", A_im},
          {"definiteness", to_string(t.definiteness)},
          {"residuals", {t.residuals[0], t.residuals[1]}}};
}

void write_scan_csv(std::ostream& out, const std::vector<ScanEntry>& scan) {
  out << "a,lambda1,lambda2,class\n";
  out.precision(15);
  for (const ScanEntry& e : scan)
    out << e.a << ',' << e.eigenvalues[0] << ',' << e.eigenvalues[1] << ','
        << (e.skipped ? "Skipped" : to_string(e.definiteness)) << '\n';
}

}  // namespace poincare
