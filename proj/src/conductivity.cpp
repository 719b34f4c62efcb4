#include "poincare/conductivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "poincare/assembly.hpp"
#include "poincare/spectral.hpp"
#include "sparse_solve.hpp"

namespace poincare {

namespace {

struct MacroSystem {
  FormPair pair;     // num = inclusion stiffness, den = full stiffness (reduced)
  VectorC load;      // reduced right-hand side F
  VectorC border;    // mean constraint (periodic meshes only)
  SparseR mass;      // nodal mass
  SparseR stiffness; // nodal full stiffness
};

MacroSystem macro_system(const TriMesh& mesh, const Source& f) {
  if (!f.value) throw ConfigError("source has no value function");
  const bool periodic = !mesh.periodic_pairs.empty();
  if (!periodic && mesh.dirichlet_nodes.empty()) throw ConfigError("macro mesh has neither Dirichlet nodes nor periodic pairs");
  MacroSystem sys;
  sys.pair = assemble_forms(mesh, std::nullopt, periodic ? ConstraintKind::PeriodicQuotient : ConstraintKind::DirichletZero);
  sys.mass = assemble_mass(mesh);
  sys.stiffness = assemble_stiffness(mesh, true, true);
  const SparseC& P = sys.pair.prolongation;
  const SparseC PH = P.adjoint();

  VectorC samples(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) samples[i] = f.value(mesh.nodes[i]);
  if (f.kind == Source::Kind::Density) {
    sys.load = PH * (sys.mass.cast<Complex>() * samples);
  } else {
    // Average over periodic images; Dirichlet nodes drop out.
    const VectorC counts = PH * VectorC::Ones(mesh.node_count());
    const VectorC g = (PH * samples).cwiseQuotient(counts);
    sys.load = sys.pair.den * g;
  }
  if (periodic) {
    sys.border = PH * (sys.mass * VectorR::Ones(mesh.node_count())).cast<Complex>();
    // Only the mean-free part of the load is compatible.
    sys.load -= (sys.load.sum() / sys.border.sum()) * sys.border;
  }
  return sys;
}

double energy(const SparseC& K, const VectorC& x) { return std::sqrt(std::max(0.0, x.dot(K * x).real())); }

void check_a(Complex a) {
  if (a == Complex(0.0)) throw ConfigError("conductivity a must be nonzero");
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw ConfigError("conductivity a must be finite");
}

SparseC tensor_stiffness(const TriMesh& mesh, const Eigen::Matrix2cd& A) {
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(mesh.triangle_count()) * 9);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const P1Element e = p1_element(mesh, t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Complex v = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) v += e.grad[a][i] * A(i, j) * e.grad[b][j];
        trips.emplace_back(mesh.triangles[t][a], mesh.triangles[t][b], e.area * v);
      }
  }
  SparseC K(mesh.node_count(), mesh.node_count());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

}  // namespace

SolveReport solve_source(const TriMesh& mesh, Complex a, const Source& f, SolveOptions options) {
  check_a(a);
  const MacroSystem sys = macro_system(mesh, f);
  const SparseC& Ki = sys.pair.num;
  const SparseC& KY = sys.pair.den;
  const SparseC K = a * Ki + (KY - Ki);

  SolveReport rep;
  rep.a = a;
  rep.lambda = 1.0 / (1.0 - a);
  rep.mesh = mesh;

  const double load_norm = sys.load.norm();
  if (load_norm == 0.0) {
    rep.field = VectorC::Zero(mesh.node_count());
    rep.near_resonance = std::numeric_limits<double>::infinity();
    return rep;
  }

  std::vector<VectorC> u, g;
  if (!detail::lu_solve(K, sys.border, {sys.load}, u))
    throw NearResonanceError("source problem is singular at this conductivity", 0.0, true);
  if (!detail::lu_solve(KY, sys.border, {sys.load}, g)) throw NumericalError("stiffness factorization failed");

  rep.energy_norm = energy(KY, u[0]);
  rep.residual = (K * u[0] - sys.load).norm() / load_norm;
  rep.near_resonance = std::abs(rep.lambda) * energy(KY, g[0]) / rep.energy_norm;

  if (options.resolvent_check) {
    const FullSpectrum full = solve_gevp_full(sys.pair);
    VectorC ur = VectorC::Zero(KY.rows());
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < full.values.size(); ++k) {
      const double lk = full.values[k];
      dist = std::min(dist, std::abs(rep.lambda - lk));
      ur += (rep.lambda / (rep.lambda - lk) * full.vectors.col(k).dot(sys.load)) * full.vectors.col(k);
    }
    rep.near_resonance = dist;
    rep.near_resonance_exact = true;
    rep.resolvent_field = sys.pair.prolongation * ur;
    rep.resolvent_difference = energy(KY, u[0] - ur) / rep.energy_norm;
  }

  if (rep.near_resonance < kResonanceDistance) {
    std::ostringstream os;
    os << "lambda = 1/(1-a) is within " << rep.near_resonance << " of the spectrum of T_eps";
    throw NearResonanceError(os.str(), rep.near_resonance, true);
  }
  if (!(rep.residual < 1e-8)) {
    std::ostringstream os;
    os << "source problem residual " << rep.residual << " exceeds 1e-8";
    throw NumericalError(os.str());
  }
  rep.field = sys.pair.prolongation * u[0];
  return rep;
}

SolveReport solve_source(const CellGeometry& geom, int N, Complex a, const Source& f, double h, BoundaryCondition bc,
                         SolveOptions options) {
  return solve_source(build_macro_mesh(geom, N, h, bc), a, f, options);
}

VectorC solve_homogenized_on(const TriMesh& mesh, const Eigen::Matrix2cd& A, const Source& f,
                             std::vector<std::string>* warnings) {
  const Definiteness d = classify_tensor(A);
  if (d == Definiteness::Degenerate) throw NumericalError("homogenized tensor is degenerate");
  if (d == Definiteness::Indefinite && warnings)
    warnings->push_back("indefinite homogenized tensor: the direct solve may be ill-posed");
  if (mesh.dirichlet_nodes.empty()) throw ConfigError("homogenized solve needs a Dirichlet mesh");
  if (!f.value) throw ConfigError("source has no value function");

  const SparseC P = build_prolongation(mesh, std::nullopt, ConstraintKind::DirichletZero);
  const SparseC PH = P.adjoint();
  const SparseC K = PH * tensor_stiffness(mesh, A) * P;
  VectorC samples(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) samples[i] = f.value(mesh.nodes[i]);
  VectorC load;
  if (f.kind == Source::Kind::Density) {
    load = PH * (assemble_mass(mesh).cast<Complex>() * samples);
  } else {
    const SparseC KY = PH * assemble_stiffness(mesh, true, true).cast<Complex>() * P;
    load = KY * (PH * samples);
  }
  std::vector<VectorC> u;
  if (!detail::lu_solve(K, VectorC(), {load}, u)) throw NumericalError("homogenized system is singular");
  const double ln = load.norm();
  if (ln > 0.0 && !((K * u[0] - load).norm() < 1e-8 * ln)) throw NumericalError("homogenized solve residual too large");
  return P * u[0];
}

HomogenizedSolve solve_homogenized(const HomogenizedTensor& tensor, const Source& f, double h) {
  HomogenizedSolve out;
  out.mesh = build_macro_mesh(CellGeometry::empty(), 1, h, BoundaryCondition::Dirichlet);
  out.field = solve_homogenized_on(out.mesh, tensor.entries, f, &out.warnings);
  return out;
}

SolveReport solve_infinite(const TriMesh& mesh, const Source& f) {
  if (!mesh.periodic_pairs.empty()) throw ConfigError("infinite-conductivity solve needs a Dirichlet mesh");
  const MacroSystem sys = macro_system(mesh, f);
  const SparseC& P = sys.pair.prolongation;
  const int n = static_cast<int>(P.cols());

  // Dof of each node (P is a selection for Dirichlet meshes).
  std::vector<int> dof(mesh.node_count(), -1);
  for (Eigen::Index c = 0; c < P.outerSize(); ++c)
    for (SparseC::InnerIterator it(P, c); it; ++it) dof[it.row()] = static_cast<int>(it.col());

  const auto [tri_comp, ncomp] = inclusion_components(mesh);
  std::vector<int> node_comp(mesh.node_count(), -1);
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (tri_comp[t] >= 0)
      for (int v : mesh.triangles[t]) node_comp[v] = tri_comp[t];
  // A component touching the Dirichlet boundary is pinned to 0.
  std::vector<bool> pinned(ncomp, false);
  for (int v : mesh.dirichlet_nodes)
    if (node_comp[v] >= 0) pinned[node_comp[v]] = true;

  std::vector<int> column(n, -1), comp_column(ncomp, -1);
  int cols = 0;
  for (int v = 0; v < mesh.node_count(); ++v)
    if (dof[v] >= 0 && node_comp[v] < 0) column[dof[v]] = cols++;
  for (int c = 0; c < ncomp; ++c)
    if (!pinned[c]) comp_column[c] = cols++;
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int v = 0; v < mesh.node_count(); ++v) {
    if (dof[v] < 0) continue;
    const int col = node_comp[v] < 0 ? column[dof[v]] : comp_column[node_comp[v]];
    if (col >= 0) trips.emplace_back(dof[v], col, 1.0);
  }
  SparseC Z(n, cols);
  Z.setFromTriplets(trips.begin(), trips.end());

  const SparseC ZH = Z.adjoint();
  const SparseC A = ZH * sys.pair.den * Z;
  const VectorC b = ZH * sys.load;

  SolveReport rep;
  rep.a = Complex(std::numeric_limits<double>::infinity(), 0.0);
  rep.lambda = 0.0;
  rep.mesh = mesh;
  std::vector<VectorC> c;
  if (b.norm() == 0.0) {
    c.push_back(VectorC::Zero(cols));
  } else if (!detail::lu_solve(A, VectorC(), {b}, c)) {
    throw NumericalError("infinite-conductivity system is singular");
  }
  const VectorC u = Z * c[0];
  rep.residual = b.norm() == 0.0 ? 0.0 : (A * c[0] - b).norm() / b.norm();
  if (!(rep.residual < 1e-8)) throw NumericalError("infinite-conductivity residual too large");
  rep.energy_norm = energy(sys.pair.den, u);
  rep.near_resonance = std::numeric_limits<double>::infinity();
  rep.field = P * u;
  return rep;
}

SolveReport solve_infinite(const CellGeometry& geom, int N, const Source& f, double h) {
  return solve_infinite(build_macro_mesh(geom, N, h, BoundaryCondition::Dirichlet), f);
}

ContrastRate high_contrast_rate(const CellGeometry& geom, int N, const Source& f, const std::vector<double>& a_values,
                                double h) {
  if (a_values.size() < 2) throw ConfigError("contrast rate needs at least two conductivities");
  for (double a : a_values)
    if (std::abs(a) < 1e2) throw ConfigError("contrast rate needs |a| >= 1e2");
  const TriMesh mesh = build_macro_mesh(geom, N, h, BoundaryCondition::Dirichlet);
  const SparseC K = assemble_stiffness(mesh, true, true).cast<Complex>();
  const VectorC u_inf = solve_infinite(mesh, f).field;

  ContrastRate out;
  out.a_values = a_values;
  for (double a : a_values) out.errors.push_back(energy(K, solve_source(mesh, a, f).field - u_inf));
  if (std::all_of(out.errors.begin(), out.errors.end(), [](double e) { return e == 0.0; })) {
    out.degenerate = true;
    out.slope = std::nan("");
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(a_values.size());
  for (size_t i = 0; i < a_values.size(); ++i) {
    const double x = std::log(std::abs(a_values[i]));
    const double y = std::log(out.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

std::vector<HomogenizationErrorRow> homogenization_error(const CellGeometry& geom, const Source& f, Complex a,
                                                         const std::vector<int>& N_list, double h) {
  check_a(a);
  const HomogenizedTensor tensor = homogenized_tensor(geom, a, h);
  std::vector<HomogenizationErrorRow> rows;
  for (int N : N_list) {
    HomogenizationErrorRow row;
    row.N = N;
    row.a = a;
    const TriMesh mesh = build_macro_mesh(geom, N, h, BoundaryCondition::Dirichlet);
    try {
      const SolveReport rep = solve_source(mesh, a, f);
      const VectorC u_star = solve_homogenized_on(mesh, tensor.entries, f);
      const VectorC d = rep.field - u_star;
      row.error_l2 = std::sqrt(std::max(0.0, d.dot(assemble_mass(mesh).cast<Complex>() * d).real()));
      row.error_h1 = energy(assemble_stiffness(mesh, true, true).cast<Complex>(), d);
      row.energy = rep.energy_norm;
    } catch (const NearResonanceError&) {
      row.resonant = true;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_error_csv(std::ostream& out, const std::vector<HomogenizationErrorRow>& rows) {
  out << "N,a_re,a_im,error_L2,error_H1,energy\n";
  out.precision(15);
  for (const auto& r : rows) {
    if (r.resonant) continue;
    out << r.N << ',' << r.a.real() << ',' << r.a.imag() << ',' << r.error_l2 << ',' << r.error_h1 << ',' << r.energy
        << '\n';
  }
}

}  // namespace poincare
