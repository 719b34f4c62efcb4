#pragma once

#include "poincare/types.hpp"

namespace poincare {

/// Eigen-decomposition of a dense Hermitian-definite pencil A x = lambda B x.
/// Values ascending; vector columns normalized so that x* B x = 1.
struct DenseEig {
  VectorR values;
  MatrixC vectors;
};

/// LAPACK zhegvd. Throws NumericalError if B is not positive definite.
DenseEig hermitian_pencil_eig(const MatrixC& A, const MatrixC& B, bool want_vectors = true);

/// LAPACK dsygvd.
DenseEig symmetric_pencil_eig(const MatrixR& A, const MatrixR& B, bool want_vectors = true);

/// Orthonormal basis (n x n-1) of the orthogonal complement of the unit
/// vector q, taken from the columns 2..n of the Householder reflector that
/// maps q to a multiple of e1.
MatrixR complement_basis(const VectorR& q);

}  // namespace poincare
