#include "poincare/assembly.hpp"

#include <cmath>
#include <iomanip>

#include <omp.h>

namespace poincare {

namespace {

using Triplet = Eigen::Triplet<double>;
using TripletC = Eigen::Triplet<Complex>;

bool selected(Region r, bool inc, bool mat) { return r == Region::Inclusion ? inc : mat; }

void stiffness_triplets(const TriMesh& mesh, int t, std::vector<Triplet>& out) {
  const P1Element e = p1_element(mesh, t);
  const auto& tri = mesh.triangles[t];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.emplace_back(tri[a], tri[b], e.area * (e.grad[a][0] * e.grad[b][0] + e.grad[a][1] * e.grad[b][1]));
}

SparseR from_triplets(int n, const std::vector<Triplet>& trips) {
  SparseR m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

std::vector<std::uint8_t> node_region_bits(const TriMesh& mesh) {
  std::vector<std::uint8_t> bits(mesh.node_count(), 0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const std::uint8_t b = mesh.regions[t] == Region::Inclusion ? 2 : 1;
    for (int v : mesh.triangles[t]) bits[v] |= b;
  }
  return bits;
}

NodeClass class_of(std::uint8_t bits) {
  if (bits == 3) return NodeClass::Interface;
  if (bits == 2) return NodeClass::InteriorInclusion;
  return NodeClass::Exterior;
}

void check_kind(const TriMesh& mesh, const std::optional<Eta>& eta, ConstraintKind kind) {
  if (kind == ConstraintKind::QuasiPeriodic) {
    if (!eta) throw ConfigError("QuasiPeriodic constraints need a quasi-momentum");
    if (eta->is_zero()) throw ConfigError("eta = 0 must be passed as None with PeriodicQuotient");
  } else if (eta) {
    throw ConfigError("a quasi-momentum is only meaningful with QuasiPeriodic constraints");
  }
  if ((kind == ConstraintKind::QuasiPeriodic || kind == ConstraintKind::PeriodicQuotient) &&
      mesh.periodic_pairs.empty())
    throw ConfigError("periodic constraints requested on a mesh without periodic pairs");
  if (kind == ConstraintKind::DirichletZero && mesh.dirichlet_nodes.empty())
    throw ConfigError("DirichletZero requested on a mesh without Dirichlet nodes");
}

}  // namespace

P1Element p1_element(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point& p0 = mesh.nodes[tri[0]];
  const Point& p1 = mesh.nodes[tri[1]];
  const Point& p2 = mesh.nodes[tri[2]];
  const double two_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  P1Element e;
  e.area = 0.5 * two_area;
  const std::array<const Point*, 3> p{&p0, &p1, &p2};
  for (int a = 0; a < 3; ++a) {
    const Point& q1 = *p[(a + 1) % 3];
    const Point& q2 = *p[(a + 2) % 3];
    e.grad[a] = {(q1[1] - q2[1]) / two_area, (q2[0] - q1[0]) / two_area};
  }
  return e;
}

SparseR assemble_stiffness_serial(const TriMesh& mesh, bool include_inclusion, bool include_matrix) {
  std::vector<Triplet> trips;
  trips.reserve(9 * static_cast<size_t>(mesh.triangle_count()));
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (selected(mesh.regions[t], include_inclusion, include_matrix)) stiffness_triplets(mesh, t, trips);
  return from_triplets(mesh.node_count(), trips);
}

SparseR assemble_stiffness(const TriMesh& mesh, bool include_inclusion, bool include_matrix, Exec exec) {
  if (exec == Exec::Serial) return assemble_stiffness_serial(mesh, include_inclusion, include_matrix);
  const int nt = mesh.triangle_count();
  std::vector<std::vector<Triplet>> local(omp_get_max_threads());
#pragma omp parallel
  {
    auto& mine = local[omp_get_thread_num()];
    mine.reserve(9 * static_cast<size_t>(nt) / local.size() + 9);
#pragma omp for schedule(static)
    for (int t = 0; t < nt; ++t)
      if (selected(mesh.regions[t], include_inclusion, include_matrix)) stiffness_triplets(mesh, t, mine);
  }
  std::vector<Triplet> trips;
  size_t total = 0;
  for (const auto& l : local) total += l.size();
  trips.reserve(total);
  for (const auto& l : local) trips.insert(trips.end(), l.begin(), l.end());
  return from_triplets(mesh.node_count(), trips);
}

SparseR assemble_mass(const TriMesh& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(9 * static_cast<size_t>(mesh.triangle_count()));
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trips.emplace_back(tri[a], tri[b], area / 12.0 * (a == b ? 2.0 : 1.0));
  }
  return from_triplets(mesh.node_count(), trips);
}

SparseC build_prolongation(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind) {
  const int n = mesh.node_count();
  std::vector<PeriodicPair> roots;
  if (kind == ConstraintKind::FreeQuotient) {
    roots.resize(n);
    for (int i = 0; i < n; ++i) roots[i] = {i, i, {0, 0}};
  } else {
    roots = resolve_masters(mesh);
  }
  std::vector<bool> fixed(n, false);
  if (kind == ConstraintKind::DirichletZero)
    for (int d : mesh.dirichlet_nodes) fixed.at(d) = true;

  std::vector<int> dof(n, -1);
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (roots[i].master == i && !fixed[i]) dof[i] = count++;

  std::vector<TripletC> trips;
  trips.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int d = dof[roots[i].master];
    if (d < 0 || fixed[i]) continue;
    Complex phase(1.0, 0.0);
    if (eta) {
      const double arg = 2.0 * kPi * (eta->e1 * roots[i].wrap[0] + eta->e2 * roots[i].wrap[1]);
      phase = std::polar(1.0, arg);
    }
    trips.emplace_back(i, d, phase);
  }
  SparseC p(n, count);
  p.setFromTriplets(trips.begin(), trips.end());
  p.makeCompressed();
  return p;
}

FormPair assemble_raw_forms(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind, Exec exec) {
  check_kind(mesh, eta, kind);
  FormPair pair;
  pair.eta = eta;
  pair.kind = kind;
  const SparseR num = assemble_stiffness(mesh, true, false, exec);
  const SparseR mat = assemble_stiffness(mesh, false, true, exec);
  pair.num = num.cast<Complex>();
  pair.den = SparseR(num + mat).cast<Complex>();
  pair.real_valued = !eta.has_value();
  const int n = mesh.node_count();
  pair.prolongation = SparseC(n, n);
  pair.prolongation.setIdentity();
  const auto bits = node_region_bits(mesh);
  pair.dof_class.resize(n);
  for (int i = 0; i < n; ++i) pair.dof_class[i] = class_of(bits[i]);
  if (kind == ConstraintKind::FreeQuotient) {
    pair.roots.resize(n);
    for (int i = 0; i < n; ++i) pair.roots[i] = {i, i, {0, 0}};
  } else {
    pair.roots = resolve_masters(mesh);
  }
  pair.dirichlet_nodes = mesh.dirichlet_nodes;
  if (kind == ConstraintKind::PeriodicQuotient || kind == ConstraintKind::FreeQuotient)
    pair.deflation = VectorR::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  return pair;
}

FormPair apply_constraints(const FormPair& pair) {
  if (pair.reduced) return pair;
  const int n = pair.size();
  std::vector<bool> fixed(n, false);
  if (pair.kind == ConstraintKind::DirichletZero)
    for (int d : pair.dirichlet_nodes) fixed.at(d) = true;
  std::vector<int> dof(n, -1);
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (pair.roots[i].master == i && !fixed[i]) dof[i] = count++;

  std::vector<TripletC> trips;
  std::vector<std::uint8_t> bits(count, 0);
  auto to_bits = [](NodeClass c) -> std::uint8_t {
    return c == NodeClass::Interface ? 3 : (c == NodeClass::InteriorInclusion ? 2 : 1);
  };
  for (int i = 0; i < n; ++i) {
    const int d = dof[pair.roots[i].master];
    if (d < 0 || fixed[i]) continue;
    Complex phase(1.0, 0.0);
    if (pair.eta) {
      const auto& w = pair.roots[i].wrap;
      phase = std::polar(1.0, 2.0 * kPi * (pair.eta->e1 * w[0] + pair.eta->e2 * w[1]));
    }
    trips.emplace_back(i, d, phase);
    bits[d] |= to_bits(pair.dof_class[i]);
  }
  SparseC p(n, count);
  p.setFromTriplets(trips.begin(), trips.end());
  p.makeCompressed();

  FormPair out;
  out.eta = pair.eta;
  out.kind = pair.kind;
  out.real_valued = pair.real_valued;
  out.reduced = true;
  const SparseC ph = p.adjoint();
  out.num = ph * pair.num * p;
  out.den = ph * pair.den * p;
  out.num.prune(Complex(0.0, 0.0));
  out.den.prune(Complex(0.0, 0.0));
  out.prolongation = pair.prolongation * p;
  out.dof_class.resize(count);
  for (int d = 0; d < count; ++d) {
    // Dofs whose incident triangles were all eliminated keep the matrix label.
    const std::uint8_t b = bits[d] == 0 ? 1 : bits[d];
    out.dof_class[d] = class_of(b);
  }
  out.roots = pair.roots;
  out.dirichlet_nodes = pair.dirichlet_nodes;
  if (pair.deflation) out.deflation = VectorR::Constant(count, 1.0 / std::sqrt(static_cast<double>(count)));
  return out;
}

FormPair assemble_forms(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind, Exec exec) {
  return apply_constraints(assemble_raw_forms(mesh, eta, kind, exec));
}

FormPair assemble_shifted_forms(const TriMesh& mesh, Eta eta) {
  if (mesh.periodic_pairs.empty()) throw ConfigError("shifted forms need a periodic mesh");
  const int n = mesh.node_count();
  std::vector<TripletC> tnum, tden;
  const double eta2 = eta.e1 * eta.e1 + eta.e2 * eta.e2;
  const Complex two_i_pi(0.0, 2.0 * kPi);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const P1Element e = p1_element(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        const double k = e.area * (e.grad[r][0] * e.grad[c][0] + e.grad[r][1] * e.grad[c][1]);
        const double eg_c = eta.e1 * e.grad[c][0] + eta.e2 * e.grad[c][1];
        const double eg_r = eta.e1 * e.grad[r][0] + eta.e2 * e.grad[r][1];
        const double m = e.area / 12.0 * (r == c ? 2.0 : 1.0);
        const Complex v = k - two_i_pi * eg_c * e.area / 3.0 + two_i_pi * eg_r * e.area / 3.0 + 4.0 * kPi * kPi * eta2 * m;
        tden.emplace_back(tri[r], tri[c], v);
        if (mesh.regions[t] == Region::Inclusion) tnum.emplace_back(tri[r], tri[c], v);
      }
  }
  FormPair pair = assemble_raw_forms(mesh, std::nullopt, ConstraintKind::PeriodicQuotient, Exec::Serial);
  pair.num = SparseC(n, n);
  pair.num.setFromTriplets(tnum.begin(), tnum.end());
  pair.den = SparseC(n, n);
  pair.den.setFromTriplets(tden.begin(), tden.end());
  pair.deflation.reset();
  pair.real_valued = false;
  FormPair out = apply_constraints(pair);
  out.eta = eta;
  out.kind = ConstraintKind::QuasiPeriodic;
  return out;
}

void write_coo(std::ostream& out, const SparseC& m) {
  out << std::setprecision(17);
  out << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

}  // namespace poincare
