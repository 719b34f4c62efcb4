#pragma once

#include <array>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "poincare/geometry.hpp"

namespace poincare {

/// Periodic correctors chi_1, chi_2 (nodal values on the cell mesh, mean
/// zero) for the conductivity a in omega and 1 in Y \ omega.
struct CellSolution {
  Complex a;
  std::array<VectorC, 2> chi;
  /// ||K chi_i - b_i|| / max_j ||b_j|| on the reduced periodic dofs.
  std::array<double, 2> residuals{};
  /// Estimated distance in a to the nearest exceptional value excited by the
  /// right-hand sides (from ||b||_{K_Y^-1} / ||chi||_{K_Y}).
  double excited_distance = 0.0;
};

/// Correctors are refused (NearResonanceError) when the excited distance
/// falls below this.
constexpr double kCellSingularDistance = 1e-6;

CellSolution solve_cell_problems(const CellGeometry& geom, Complex a, double h);
CellSolution solve_cell_problems(const TriMesh& cell, Complex a);

struct HomogenizedTensor {
  Complex a;
  Eigen::Matrix2cd entries;
  Definiteness definiteness = Definiteness::Degenerate;
  std::array<double, 2> residuals{};
  /// Eigenvalues of the real part, ascending.
  std::array<double, 2> real_eigenvalues{};
};

/// Classification from the eigenvalues of Re(A): a magnitude below
/// 1e-8 ||A|| is Degenerate. Complex when Im(A) exceeds 1e-10 ||A||.
Definiteness classify_tensor(const Eigen::Matrix2cd& A, std::array<double, 2>* real_eigenvalues = nullptr);

HomogenizedTensor homogenized_tensor(const CellGeometry& geom, Complex a, double h);
HomogenizedTensor homogenized_tensor(const TriMesh& cell, Complex a);

/// A*_{ij} = int_Y A (e_i + grad chi_i) . (e_j + grad chi_j).
Eigen::Matrix2cd tensor_from_correctors(const TriMesh& cell, const CellSolution& sol);

struct ExceptionalSet {
  /// a = 1 - 1/lambda for the computed nontrivial cell eigenvalues, ascending.
  std::vector<double> values;
  /// Image of the essential-spectrum point 1/2.
  double essential = -1.0;
};

/// Uses the k smallest and k largest nontrivial cell eigenvalues.
ExceptionalSet exceptional_set(const CellGeometry& geom, double h, int k);

/// min over `directions` sampled unit vectors xi of
/// int_{Y \ omega} |grad w + xi|^2, w the periodic Neumann corrector of the
/// matrix region. Equals 1 for an empty inclusion.
double ellipticity_lower_bound(const CellGeometry& geom, double h, int directions);

/// The 2x2 form B with xi . B xi = int_{Y \ omega} |grad w(xi) + xi|^2.
Eigen::Matrix2d matrix_energy_form(const TriMesh& cell);

struct ScanEntry {
  double a = 0.0;
  bool skipped = false;  ///< cell problem singular at this a
  std::array<double, 2> eigenvalues{};
  Definiteness definiteness = Definiteness::Degenerate;
};

std::vector<ScanEntry> definiteness_scan(const CellGeometry& geom, const std::vector<double>& a_values, double h);

/// {a_re, a_im, A, definiteness, residuals}
nlohmann::json tensor_json(const HomogenizedTensor& t);

/// CSV "a,lambda1,lambda2,class"; skipped rows carry nan and class Skipped.
void write_scan_csv(std::ostream& out, const std::vector<ScanEntry>& scan);

}  // namespace poincare
