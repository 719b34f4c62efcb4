#pragma once

#include <vector>

#include <Eigen/SparseLU>

#include "poincare/types.hpp"

namespace poincare::detail {

/// LU of K, or of [K w; w^T 0] when w is non-empty (mean constraint w^T x =
/// 0). Returns false when the factorization or a solve fails.
inline bool lu_solve(const SparseC& K, const VectorC& w, const std::vector<VectorC>& rhs, std::vector<VectorC>& out) {
  const Eigen::Index n = K.rows();
  const bool bordered = w.size() > 0;
  const Eigen::Index m = bordered ? n + 1 : n;
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(K.nonZeros() + 2 * n));
  for (Eigen::Index c = 0; c < K.outerSize(); ++c)
    for (SparseC::InnerIterator it(K, c); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  if (bordered)
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] == Complex(0.0)) continue;
      trips.emplace_back(i, n, w[i]);
      trips.emplace_back(n, i, w[i]);
    }
  SparseC B(m, m);
  B.setFromTriplets(trips.begin(), trips.end());
  B.makeCompressed();
  Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(B);
  if (lu.info() != Eigen::Success) return false;
  out.clear();
  for (const VectorC& b : rhs) {
    VectorC full = VectorC::Zero(m);
    full.head(n) = b;
    VectorC x = lu.solve(full);
    if (lu.info() != Eigen::Success || !x.allFinite()) return false;
    out.push_back(x.head(n));
  }
  return true;
}

}  // namespace poincare::detail
