#include "poincare/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "poincare/dense_gevp.hpp"

namespace poincare {

std::string OperatorLabel::name() const {
  switch (kind) {
    case OperatorKind::Cell: return "cell";
    case OperatorKind::FreeCell: return "free_cell";
    case OperatorKind::Bloch: return "bloch";
    case OperatorKind::Finite: return bc == BoundaryCondition::Dirichlet ? "finite_dirichlet" : "finite_periodic";
    case OperatorKind::Pack: return "pack_" + std::to_string(K);
    case OperatorKind::Generic: break;
  }
  return "generic";
}

namespace {

/// Raw eigenpairs of the part of the pencil that can carry nontrivial
/// values, plus the trivial counts known from the block structure.
struct RawSpectrum {
  std::vector<double> values;  // ascending
  /// Eigenvector of values[i] in the dof basis, den-normalized.
  std::function<VectorC(int)> vector;
  int extra_zero = 0;
  int extra_one = 0;
  int dofs = 0;
};

template <class S>
using Sparse = Eigen::SparseMatrix<S>;
template <class S>
using Dense = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
Sparse<S> convert(const SparseC& m);
template <>
Sparse<double> convert<double>(const SparseC& m) {
  return m.real();
}
template <>
Sparse<Complex> convert<Complex>(const SparseC& m) {
  return m;
}

template <class S>
Sparse<S> submatrix(const Sparse<S>& m, const std::vector<int>& rmap, int nr, const std::vector<int>& cmap, int nc) {
  std::vector<Eigen::Triplet<S>> trips;
  for (int k = 0; k < m.outerSize(); ++k)
    for (typename Sparse<S>::InnerIterator it(m, k); it; ++it) {
      const int r = rmap[it.row()];
      const int c = cmap[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  Sparse<S> out(nr, nc);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

DenseEig pencil_eig(const Dense<double>& a, const Dense<double>& b) { return symmetric_pencil_eig(a, b, true); }
DenseEig pencil_eig(const Dense<Complex>& a, const Dense<Complex>& b) { return hermitian_pencil_eig(a, b, true); }

/// Dense eigen-decomposition of (a, b) with optional deflation of unit
/// vector q. Vectors are returned in the undeflated basis.
template <class S>
DenseEig deflated_eig(const Dense<S>& a, const Dense<S>& b, const std::optional<VectorR>& q) {
  if (!q) return pencil_eig(a, b);
  const Dense<S> basis = complement_basis(*q).template cast<S>();
  const Dense<S> ad = basis.adjoint() * a * basis;
  const Dense<S> bd = basis.adjoint() * b * basis;
  DenseEig eig = pencil_eig(ad, bd);
  eig.vectors = basis.template cast<Complex>() * eig.vectors;
  return eig;
}

template <class S>
RawSpectrum dense_route(const FormPair& pair) {
  const Dense<S> a = Dense<S>(convert<S>(pair.num));
  const Dense<S> b = Dense<S>(convert<S>(pair.den));
  DenseEig eig = deflated_eig<S>(a, b, pair.deflation);
  RawSpectrum raw;
  raw.values.assign(eig.values.data(), eig.values.data() + eig.values.size());
  auto vecs = std::make_shared<MatrixC>(std::move(eig.vectors));
  raw.vector = [vecs](int i) { return VectorC(vecs->col(i)); };
  raw.dofs = static_cast<int>(eig.values.size());
  return raw;
}

/// Exact condensation onto the interface. With the splitting
/// I (inclusion interior), G (interface), E (exterior), the pencil is
/// congruent to diag((K_II, K_II), (S_w, S_w + S_m), (0, K_EE)), so the
/// I block only carries eigenvalue 1 and the E block only eigenvalue 0.
template <class S>
struct Condensation {
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  int n = 0, ni = 0, ng = 0, ne = 0;
  std::vector<int> imap, gmap, emap;
  Eigen::SimplicialLDLT<Sparse<S>> fw, fm;
  Sparse<S> kw_ig, km_eg;
  MatrixC y;  // interface eigenvectors

  VectorC lift(int i) const {
    Vec yi;
    if constexpr (std::is_same_v<S, double>)
      yi = y.col(i).real();
    else
      yi = y.col(i);
    Vec xi, xe;
    if (ni > 0) xi = -fw.solve(Vec(kw_ig * yi));
    if (ne > 0) xe = -fm.solve(Vec(km_eg * yi));
    VectorC x(n);
    for (int d = 0; d < n; ++d) {
      if (gmap[d] >= 0)
        x[d] = yi[gmap[d]];
      else if (imap[d] >= 0)
        x[d] = xi[imap[d]];
      else
        x[d] = xe[emap[d]];
    }
    return x;
  }
};

/// Exact condensation onto the interface. With the splitting
/// I (inclusion interior), G (interface), E (exterior), the pencil is
/// congruent to diag((K_II, K_II), (S_w, S_w + S_m), (0, K_EE)), so the
/// I block only carries eigenvalue 1 and the E block only eigenvalue 0.
template <class S>
std::optional<RawSpectrum> condensed_route(const FormPair& pair) {
  auto c = std::make_shared<Condensation<S>>();
  const int n = c->n = pair.size();
  c->imap.assign(n, -1);
  c->gmap.assign(n, -1);
  c->emap.assign(n, -1);
  for (int d = 0; d < n; ++d) {
    switch (pair.dof_class[d]) {
      case NodeClass::InteriorInclusion: c->imap[d] = c->ni++; break;
      case NodeClass::Interface: c->gmap[d] = c->ng++; break;
      case NodeClass::Exterior: c->emap[d] = c->ne++; break;
    }
  }
  const int ni = c->ni, ng = c->ng, ne = c->ne;
  if (ng == 0) return std::nullopt;

  const Sparse<S> kw = convert<S>(pair.num);
  const Sparse<S> km = convert<S>(SparseC(pair.den - pair.num));

  Dense<S> sw = Dense<S>(submatrix<S>(kw, c->gmap, ng, c->gmap, ng));
  Dense<S> sm = Dense<S>(submatrix<S>(km, c->gmap, ng, c->gmap, ng));
  constexpr int kBlock = 64;

  if (ni > 0) {
    c->kw_ig = submatrix<S>(kw, c->imap, ni, c->gmap, ng);
    c->fw.compute(submatrix<S>(kw, c->imap, ni, c->imap, ni));
    if (c->fw.info() != Eigen::Success) return std::nullopt;
    const Sparse<S> kw_gi = c->kw_ig.adjoint();
    for (int c0 = 0; c0 < ng; c0 += kBlock) {
      const int nc = std::min(kBlock, ng - c0);
      const Dense<S> z = c->fw.solve(Dense<S>(c->kw_ig.middleCols(c0, nc)));
      sw.middleCols(c0, nc) -= kw_gi * z;
    }
  }
  if (ne > 0) {
    c->km_eg = submatrix<S>(km, c->emap, ne, c->gmap, ng);
    c->fm.compute(submatrix<S>(km, c->emap, ne, c->emap, ne));
    if (c->fm.info() != Eigen::Success) return std::nullopt;
    const Sparse<S> km_ge = c->km_eg.adjoint();
    for (int c0 = 0; c0 < ng; c0 += kBlock) {
      const int nc = std::min(kBlock, ng - c0);
      const Dense<S> z = c->fm.solve(Dense<S>(c->km_eg.middleCols(c0, nc)));
      sm.middleCols(c0, nc) -= km_ge * z;
    }
  }
  // Symmetrize away roundoff before the dense solver reads the upper part.
  sw = (0.5 * (sw + Dense<S>(sw.adjoint()))).eval();
  Dense<S> sy = sw + sm;
  sy = (0.5 * (sy + Dense<S>(sy.adjoint()))).eval();

  std::optional<VectorR> q;
  if (pair.deflation) {
    VectorR qg(ng);
    for (int d = 0; d < n; ++d)
      if (c->gmap[d] >= 0) qg[c->gmap[d]] = (*pair.deflation)[d];
    if (qg.norm() == 0.0) return std::nullopt;
    q = qg / qg.norm();
  }
  DenseEig eig;
  try {
    eig = deflated_eig<S>(sw, sy, q);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  c->y = std::move(eig.vectors);

  RawSpectrum raw;
  raw.values.assign(eig.values.data(), eig.values.data() + eig.values.size());
  raw.vector = [c](int i) { return c->lift(i); };
  raw.extra_one = ni;
  raw.extra_zero = ne;
  raw.dofs = n - (pair.deflation ? 1 : 0);
  return raw;
}

RawSpectrum raw_spectrum(const FormPair& pair, GevpMethod method) {
  if (method != GevpMethod::Dense) {
    std::optional<RawSpectrum> r =
        pair.real_valued ? condensed_route<double>(pair) : condensed_route<Complex>(pair);
    if (r) return *r;
    if (method == GevpMethod::Condensed)
      throw NumericalError("interface condensation failed (no interface or singular interior block)");
  }
  return pair.real_valued ? dense_route<double>(pair) : dense_route<Complex>(pair);
}

double residual(const FormPair& pair, const VectorC& x, double lambda) {
  const VectorC bx = pair.den * x;
  const VectorC r = pair.num * x - lambda * bx;
  const double nb = bx.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

}  // namespace

SpectrumResult solve_gevp(const FormPair& input, int k_lo, int k_hi, GevpMethod method) {
  if (k_lo < 0 || k_hi < 0) throw ConfigError("eigenvalue counts must be non-negative");
  const FormPair pair = input.reduced ? input : apply_constraints(input);
  RawSpectrum raw = raw_spectrum(pair, method);

  SpectrumResult res;
  res.prolongation = pair.prolongation;
  res.dofs = raw.dofs;
  res.zero_multiplicity = raw.extra_zero;
  res.one_multiplicity = raw.extra_one;

  std::vector<int> nontrivial_idx;
  for (size_t i = 0; i < raw.values.size(); ++i) {
    const double v = raw.values[i];
    res.clamp_violation = std::max({res.clamp_violation, -v, v - 1.0});
    if (v < kTrivialThreshold)
      ++res.zero_multiplicity;
    else if (v > 1.0 - kTrivialThreshold)
      ++res.one_multiplicity;
    else
      nontrivial_idx.push_back(static_cast<int>(i));
  }
  if (res.clamp_violation > kClampTolerance) {
    std::ostringstream os;
    os << "eigenvalue outside [0,1] by " << res.clamp_violation << " (Rayleigh bound violated)";
    throw NumericalError(os.str());
  }
  std::stable_sort(nontrivial_idx.begin(), nontrivial_idx.end(),
                   [&](int a, int b) { return raw.values[a] < raw.values[b]; });
  for (int i : nontrivial_idx) res.nontrivial.push_back(raw.values[i]);

  const int count = static_cast<int>(nontrivial_idx.size());
  std::vector<int> pick;
  for (int i = 0; i < std::min(k_lo, count); ++i) pick.push_back(i);
  for (int i = std::max(count - k_hi, 0); i < count; ++i)
    if (pick.empty() || i > pick.back()) pick.push_back(i);

  res.vectors.resize(pair.size(), static_cast<Eigen::Index>(pick.size()));
  for (size_t c = 0; c < pick.size(); ++c) {
    const int i = nontrivial_idx[pick[c]];
    const double lambda = raw.values[i];
    const VectorC x = raw.vector(i);
    const double r = residual(pair, x, lambda);
    if (!(r < kResidualTolerance)) {
      std::ostringstream os;
      os << "eigenpair residual " << r << " exceeds " << kResidualTolerance << " at lambda = " << lambda;
      throw NumericalError(os.str());
    }
    res.eigenvalues.push_back(std::clamp(lambda, 0.0, 1.0));
    res.residuals.push_back(r);
    res.vectors.col(static_cast<Eigen::Index>(c)) = x;
  }
  return res;
}

FullSpectrum solve_gevp_full(const FormPair& input) {
  const FormPair pair = input.reduced ? input : apply_constraints(input);
  RawSpectrum raw = pair.real_valued ? dense_route<double>(pair) : dense_route<Complex>(pair);
  FullSpectrum out;
  out.values = Eigen::Map<VectorR>(raw.values.data(), static_cast<Eigen::Index>(raw.values.size()));
  out.vectors.resize(pair.size(), out.values.size());
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.vectors.col(i) = raw.vector(static_cast<int>(i));
  return out;
}

SpectrumResult cell_spectrum(const CellGeometry& geom, double h, int k, GevpMethod method) {
  const TriMesh mesh = build_cell_mesh(geom, h);
  SpectrumResult res = solve_gevp(assemble_forms(mesh, std::nullopt, ConstraintKind::PeriodicQuotient), k, k, method);
  res.label.kind = OperatorKind::Cell;
  return res;
}

Bounds free_cell_bounds(const CellGeometry& geom, double h) {
  if (geom.is_laminate()) throw ConfigError("free-cell bounds need an inclusion strictly inside the cell (not a laminate)");
  if (geom.is_empty()) throw ConfigError("free-cell bounds need a non-empty inclusion");
  const TriMesh mesh = build_cell_mesh(geom, h);
  const FormPair pair = assemble_forms(mesh, std::nullopt, ConstraintKind::FreeQuotient);
  const SpectrumResult res = solve_gevp(pair, 1, 1);
  if (res.nontrivial.empty()) throw NumericalError("free-cell operator has no nontrivial eigenvalue at this h");
  // Values within a decade of the trivial threshold cannot be classified.
  const auto ambiguous = [](double v) {
    return (v > 0.1 * kTrivialThreshold && v < 10.0 * kTrivialThreshold) ||
           (v < 1.0 - 0.1 * kTrivialThreshold && v > 1.0 - 10.0 * kTrivialThreshold);
  };
  if (ambiguous(res.nontrivial.front()) || ambiguous(res.nontrivial.back()))
    throw NumericalError("spectral separation failure: cannot distinguish m from 0 (or M from 1); refine h");
  return {res.nontrivial.front(), res.nontrivial.back()};
}

SpectrumResult finite_spectrum(const CellGeometry& geom, int N, double h, int k, BoundaryCondition bc,
                               GevpMethod method) {
  const TriMesh mesh = build_macro_mesh(geom, N, h, bc);
  const ConstraintKind kind =
      bc == BoundaryCondition::Dirichlet ? ConstraintKind::DirichletZero : ConstraintKind::PeriodicQuotient;
  SpectrumResult res = solve_gevp(assemble_forms(mesh, std::nullopt, kind), k, k, method);
  res.label.kind = OperatorKind::Finite;
  res.label.N = N;
  res.label.bc = bc;
  return res;
}

SpectrumResult pack_spectrum(const CellGeometry& geom, int K, double h, int k, GevpMethod method) {
  const TriMesh mesh = build_pack_mesh(geom, K, h);
  SpectrumResult res = solve_gevp(assemble_forms(mesh, std::nullopt, ConstraintKind::PeriodicQuotient), k, k, method);
  res.label.kind = OperatorKind::Pack;
  res.label.K = K;
  return res;
}

double boundary_energy_fraction(const VectorC& u, const TriMesh& mesh, double width) {
  if (u.size() != mesh.node_count()) throw NumericalError("boundary energy: vector does not match the mesh");
  double band = 0.0, total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.nodes[tri[0]];
    const Point& p1 = mesh.nodes[tri[1]];
    const Point& p2 = mesh.nodes[tri[2]];
    const double two_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const std::array<const Point*, 3> p{&p0, &p1, &p2};
    Complex gx = 0.0, gy = 0.0;
    for (int a = 0; a < 3; ++a) {
      const Point& q1 = *p[(a + 1) % 3];
      const Point& q2 = *p[(a + 2) % 3];
      gx += u[tri[a]] * (q1[1] - q2[1]) / two_area;
      gy += u[tri[a]] * (q2[0] - q1[0]) / two_area;
    }
    const double e = 0.5 * two_area * (std::norm(gx) + std::norm(gy));
    total += e;
    const double cx = (p0[0] + p1[0] + p2[0]) / 3.0;
    const double cy = (p0[1] + p1[1] + p2[1]) / 3.0;
    const double dist = std::min({cx, cy, mesh.side - cx, mesh.side - cy});
    if (dist < width) band += e;
  }
  return total > 0.0 ? band / total : 0.0;
}

double boundary_energy_fraction(const SpectrumResult& result, int handle, const TriMesh& mesh, double width) {
  return boundary_energy_fraction(result.nodal_vector(handle), mesh, width);
}

}  // namespace poincare
