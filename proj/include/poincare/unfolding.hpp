#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>

#include "poincare/geometry.hpp"

namespace poincare {

/// Cell-resolved field: micro.col(xi) holds the nodal values on the reference
/// cell mesh of macro cell xi = ty * N + tx.
struct TwoScaleField {
  int N = 0;
  MatrixC micro;
};

/// Unfolding E, local averaging P and the inner products they are adjoint
/// for, on a macro mesh produced by tile_cell_mesh.
class Unfolding {
 public:
  explicit Unfolding(const TriMesh& macro);

  int N() const { return N_; }
  const TriMesh& reference_cell() const { return cell_; }

  /// (E u)(xi, y) = u(eps xi + eps y), by restriction to each tile.
  TwoScaleField unfold(const VectorC& u) const;

  /// Adjoint of unfold for the inner products below: M_Omega^-1 sum_xi
  /// R_xi^T M_Y U_xi / N^2. project(unfold(u)) = u.
  VectorC project(const TwoScaleField& U) const;

  /// int_Omega conj(u) v
  Complex inner(const VectorC& u, const VectorC& v) const;
  /// (1/N^2) sum_xi int_Y conj(U_xi) V_xi
  Complex inner(const TwoScaleField& U, const TwoScaleField& V) const;

  Complex integral(const VectorC& u) const;
  Complex integral(const TwoScaleField& U) const;

 private:
  const TriMesh* macro_;
  int N_;
  TriMesh cell_;
  SparseR mass_macro_;
  SparseR mass_cell_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseR>> mass_solver_;
};

TwoScaleField unfold(const TriMesh& macro, const VectorC& u);
VectorC project(const TriMesh& macro, const TwoScaleField& U);

/// Q1 function on (0,1)^2 over the N x N cell grid. vertex(i, j) is the value
/// at (i, j) / N.
struct Q1Field {
  int N = 0;
  VectorC vertex;  ///< (N+1)^2 values, index j * (N+1) + i

  Complex operator()(Point x) const;
  /// Exact L2(Omega) norm of the bilinear interpolant.
  double l2_norm() const;
};

/// I_eps: the value at vertex eps xi is the average of u over cell xi, for
/// xi in {0..N}^2 (averages given as (N+1)^2 values, index xi2 * (N+1) + xi1).
Q1Field interpolate_q1(const VectorC& averages, int N);

/// Same with the averages of the N^2 cells of Omega (index xi2 * N + xi1) and
/// zero outside Omega.
Q1Field interpolate_q1_zero_extended(const VectorC& averages, int N);

/// Average of a P1 field over each cell, index ty * N + tx.
VectorC cell_averages(const TriMesh& macro, const VectorC& u);

/// Cell averages of d u / d x_i (piecewise constant gradients).
std::array<VectorC, 2> cell_gradient_averages(const TriMesh& macro, const VectorC& u);

/// u0 + eps zeta sum_i I_eps(d u0 / d x_i) chi_i(x / eps) at the macro nodes,
/// zeta(x) = min(1, dist(x, boundary) / cutoff_width). chi_i holds nodal
/// values on the reference cell mesh.
VectorC corrector_expand(const TriMesh& macro, const VectorC& u0, const std::array<VectorC, 2>& chi,
                         double cutoff_width);

}  // namespace poincare
