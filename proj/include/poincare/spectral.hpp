#pragma once

#include <string>
#include <vector>

#include "poincare/assembly.hpp"
#include "poincare/geometry.hpp"

namespace poincare {

enum class OperatorKind { Cell, FreeCell, Bloch, Finite, Pack, Generic };

struct OperatorLabel {
  OperatorKind kind = OperatorKind::Generic;
  Eta eta{};
  int N = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int K = 0;

  /// Short name used in CSV output: cell, free_cell, bloch, finite_dirichlet,
  /// finite_periodic, pack_K, generic.
  std::string name() const;
};

/// Eigenvalues below this are classified as 0, above 1 - this as 1.
constexpr double kTrivialThreshold = 1e-6;
/// Pre-clamp tolerance on the Rayleigh bound and residual bound.
constexpr double kClampTolerance = 1e-8;
constexpr double kResidualTolerance = 1e-8;

struct SpectrumResult {
  OperatorLabel label;
  /// Selected nontrivial eigenvalues (k_lo smallest and k_hi largest),
  /// ascending, clamped to [0,1].
  std::vector<double> eigenvalues;
  /// ||A_num x - lambda A_den x|| / ||A_den x|| per selected eigenvalue.
  std::vector<double> residuals;
  /// Column i (the handle of eigenvalue i) holds its eigenvector in the
  /// constrained dof basis, normalized x* A_den x = 1.
  MatrixC vectors;
  /// nodes x dofs map from the dof basis to nodal values.
  SparseC prolongation;

  /// Every nontrivial eigenvalue found, ascending.
  std::vector<double> nontrivial;
  int zero_multiplicity = 0;
  int one_multiplicity = 0;
  /// Largest excursion outside [0,1] before clamping.
  double clamp_violation = 0.0;
  /// Size of the constrained (and deflated) problem.
  int dofs = 0;

  VectorC nodal_vector(int handle) const { return prolongation * vectors.col(handle); }
};

enum class GevpMethod {
  Auto,       ///< Condensed when an interface exists, dense otherwise.
  Dense,      ///< Full dense pencil on all constrained dofs.
  Condensed,  ///< Exact Schur complement onto the interface dofs.
};

/// k_lo smallest and k_hi largest nontrivial generalized eigenvalues of
/// num x = lambda den x, after projecting out the deflation vector.
SpectrumResult solve_gevp(const FormPair& pair, int k_lo, int k_hi, GevpMethod method = GevpMethod::Auto);

/// Complete decomposition of the (deflated) pencil: all values ascending and
/// all den-orthonormal vectors in the constrained dof basis.
struct FullSpectrum {
  VectorR values;
  MatrixC vectors;
};
FullSpectrum solve_gevp_full(const FormPair& pair);

/// Spectrum of T_0 on the cell (periodic quotient).
SpectrumResult cell_spectrum(const CellGeometry& geom, double h, int k, GevpMethod method = GevpMethod::Auto);

/// Smallest and largest eigenvalues distinct from 0 and 1 of the free-cell
/// operator (natural boundary conditions on the cell, quotient by constants).
struct Bounds {
  double m = 0.0;
  double M = 0.0;
};
Bounds free_cell_bounds(const CellGeometry& geom, double h);

SpectrumResult finite_spectrum(const CellGeometry& geom, int N, double h, int k, BoundaryCondition bc,
                               GevpMethod method = GevpMethod::Auto);

SpectrumResult pack_spectrum(const CellGeometry& geom, int K, double h, int k, GevpMethod method = GevpMethod::Auto);

/// Fraction of the Dirichlet energy of eigenvector `handle` carried by the
/// triangles whose centroid lies within `width` of the domain boundary.
double boundary_energy_fraction(const SpectrumResult& result, int handle, const TriMesh& mesh, double width);

/// Same indicator for a nodal field.
double boundary_energy_fraction(const VectorC& nodal, const TriMesh& mesh, double width);

}  // namespace poincare
