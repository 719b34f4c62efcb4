#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "poincare/geometry.hpp"

namespace poincare {

enum class ConstraintKind { PeriodicQuotient, QuasiPeriodic, DirichletZero, FreeQuotient };

enum class Exec { Serial, Parallel };

/// Numerator/denominator energies of the Poincare quotient.
///   num ~ int_omega (grad + 2i pi eta) u . conj((grad + 2i pi eta) v)
///   den ~ same integral over the whole domain.
/// Before apply_constraints the matrices act on all mesh nodes; afterwards on
/// the constrained degrees of freedom, with `prolongation` mapping dofs back
/// to nodal values.
struct FormPair {
  std::optional<Eta> eta;
  ConstraintKind kind = ConstraintKind::PeriodicQuotient;
  SparseC num;
  SparseC den;
  bool reduced = false;
  bool real_valued = true;  ///< all entries real (no Bloch phases)

  /// Unit vector spanning the constant mode to be projected out (quotient
  /// kinds only), in the current basis.
  std::optional<VectorR> deflation;

  /// nodes x dofs. Identity before reduction.
  SparseC prolongation;

  /// Region classification of each current dof (union over periodic images).
  std::vector<NodeClass> dof_class;

  // Constraint data carried from the mesh.
  std::vector<PeriodicPair> roots;
  std::vector<int> dirichlet_nodes;

  int size() const { return static_cast<int>(den.rows()); }
};

/// Area and constant basis-function gradients of one triangle.
struct P1Element {
  double area;
  std::array<std::array<double, 2>, 3> grad;
};
P1Element p1_element(const TriMesh& mesh, int t);

/// P1 stiffness restricted to triangles of the selected regions.
/// include_inclusion / include_matrix select which triangles contribute.
SparseR assemble_stiffness(const TriMesh& mesh, bool include_inclusion, bool include_matrix,
                           Exec exec = Exec::Parallel);

/// Reference element loop kept for testing the parallel kernel.
SparseR assemble_stiffness_serial(const TriMesh& mesh, bool include_inclusion, bool include_matrix);

/// Consistent P1 mass matrix over the whole mesh.
SparseR assemble_mass(const TriMesh& mesh);

/// Unreduced pair on all mesh nodes.
FormPair assemble_raw_forms(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind,
                            Exec exec = Exec::Parallel);

/// Eliminates slave / Dirichlet nodes. Quasi-periodic slaves carry the factor
/// exp(2i pi eta . wrap) relative to their master.
FormPair apply_constraints(const FormPair& pair);

/// assemble_raw_forms followed by apply_constraints.
FormPair assemble_forms(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind,
                        Exec exec = Exec::Parallel);

/// Shifted-gradient formulation on periodic P1 functions:
/// int (grad + 2i pi eta) phi_a . conj((grad + 2i pi eta) phi_b). Returned
/// reduced with plain periodic identification. Converges to the same
/// spectrum as the phase-factor route as h -> 0.
FormPair assemble_shifted_forms(const TriMesh& mesh, Eta eta);

/// Prolongation for the given constraint kind (nodes x dofs).
SparseC build_prolongation(const TriMesh& mesh, std::optional<Eta> eta, ConstraintKind kind);

/// Coordinate text export "row col re im", one entry per line, 0-based.
void write_coo(std::ostream& out, const SparseC& m);

}  // namespace poincare
