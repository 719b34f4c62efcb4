#include "poincare/dense_gevp.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <sstream>

namespace poincare {

namespace {

[[noreturn]] void report(const char* routine, lapack_int info, lapack_int n) {
  std::ostringstream os;
  if (info > n)
    os << routine << ": denominator matrix is not positive definite (leading minor " << info - n << ")";
  else
    os << routine << ": eigensolver failed to converge (info " << info << ")";
  throw NumericalError(os.str());
}

}  // namespace

DenseEig hermitian_pencil_eig(const MatrixC& A, const MatrixC& B, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  DenseEig out;
  out.values.resize(n);
  if (n == 0) return out;
  MatrixC a = A;
  MatrixC b = B;
  const lapack_int info = LAPACKE_zhegvd(LAPACK_COL_MAJOR, 1, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                                         b.data(), n, out.values.data());
  if (info != 0) report("zhegvd", info, n);
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

DenseEig symmetric_pencil_eig(const MatrixR& A, const MatrixR& B, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  DenseEig out;
  out.values.resize(n);
  if (n == 0) return out;
  MatrixR a = A;
  MatrixR b = B;
  const lapack_int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, want_vectors ? 'V' : 'N', 'U', n, a.data(), n,
                                         b.data(), n, out.values.data());
  if (info != 0) report("dsygvd", info, n);
  if (want_vectors) out.vectors = a.cast<Complex>();
  return out;
}

MatrixR complement_basis(const VectorR& q) {
  const Eigen::Index n = q.size();
  // H = I - 2 w w^T with H q = -sign(q0) |q| e1.
  VectorR w = q;
  const double alpha = q.norm();
  w[0] += (q[0] >= 0.0 ? alpha : -alpha);
  w /= w.norm();
  MatrixR basis(n, n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    basis.col(j - 1) = -2.0 * w[j] * w;
    basis(j, j - 1) += 1.0;
  }
  return basis;
}

}  // namespace poincare
