#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "poincare/geometry.hpp"
#include "poincare/homogenization.hpp"

namespace poincare {

/// Right-hand side either as an L2 density f (load M f) or as the Riesz
/// representative g in H^1_0 (load K_Y g). Both are sampled at the nodes.
struct Source {
  enum class Kind { Density, Riesz };
  Kind kind = Kind::Density;
  std::function<Complex(Point)> value;

  static Source density(std::function<Complex(Point)> f) { return {Kind::Density, std::move(f)}; }
  static Source riesz(std::function<Complex(Point)> g) { return {Kind::Riesz, std::move(g)}; }
  static Source constant(double c) {
    return density([c](Point) { return Complex(c); });
  }
};

struct SolveOptions {
  /// Also build u = lambda (lambda - T)^-1 g from a full eigendecomposition
  /// and report its energy-norm distance to the direct solve.
  bool resolvent_check = false;
};

/// Solves the direct complex-symmetric solve for u with
/// -div(A_eps grad u) = f, A_eps = a in the inclusions and 1 elsewhere.
struct SolveReport {
  Complex a;
  Complex lambda;  ///< 1 / (1 - a)
  TriMesh mesh;
  VectorC field;  ///< nodal values
  double energy_norm = 0.0;  ///< ||grad u||_{L2}
  double residual = 0.0;     ///< ||K(a) u - F|| / ||F||
  /// Distance from lambda to sigma(T_eps): exact when the resolvent check
  /// ran, otherwise the excited-mode estimate |lambda| ||g|| / ||u|| (an
  /// upper bound for the nearest excited eigenvalue).
  double near_resonance = 0.0;
  bool near_resonance_exact = false;
  std::optional<VectorC> resolvent_field;
  /// ||grad(u_direct - u_resolvent)|| / ||grad u_direct||
  std::optional<double> resolvent_difference;
};

/// NearResonanceError below this lambda-distance.
constexpr double kResonanceDistance = 1e-6;

SolveReport solve_source(const CellGeometry& geom, int N, Complex a, const Source& f, double h,
                         BoundaryCondition bc = BoundaryCondition::Dirichlet, SolveOptions options = {});

/// Same on a prebuilt macro mesh.
SolveReport solve_source(const TriMesh& mesh, Complex a, const Source& f, SolveOptions options = {});

struct HomogenizedSolve {
  TriMesh mesh;
  VectorC field;
  std::vector<std::string> warnings;
};

/// -div(A grad u) = f on (0,1)^2 with u = 0 on the boundary, P1 on a uniform
/// grid of size h. Degenerate tensors are refused.
HomogenizedSolve solve_homogenized(const HomogenizedTensor& tensor, const Source& f, double h);

/// Same on a given mesh with Dirichlet nodes (the region tags are ignored).
VectorC solve_homogenized_on(const TriMesh& mesh, const Eigen::Matrix2cd& A, const Source& f,
                             std::vector<std::string>* warnings = nullptr);

/// Infinite-conductivity limit: u constant on each inclusion, harmonic in the
/// matrix. Equals the H^1_0 projection of g onto Ker(T_eps).
SolveReport solve_infinite(const CellGeometry& geom, int N, const Source& f, double h);
SolveReport solve_infinite(const TriMesh& mesh, const Source& f);

struct ContrastRate {
  std::vector<double> a_values;
  std::vector<double> errors;  ///< ||grad(u^a - u^inf)||
  double slope = 0.0;          ///< least-squares slope of log error vs log|a|
  bool degenerate = false;     ///< all errors zero (f = 0)
};

ContrastRate high_contrast_rate(const CellGeometry& geom, int N, const Source& f, const std::vector<double>& a_values,
                                double h);

struct HomogenizationErrorRow {
  int N = 0;
  Complex a;
  double error_l2 = 0.0;
  double error_h1 = 0.0;
  double energy = 0.0;
  bool resonant = false;  ///< excluded: resonance at this N
};

/// ||u_eps^a - u_*^a|| per N, both fields on the same macro mesh.
std::vector<HomogenizationErrorRow> homogenization_error(const CellGeometry& geom, const Source& f, Complex a,
                                                         const std::vector<int>& N_list, double h);

/// CSV "N,a_re,a_im,error_L2,error_H1,energy"; resonant rows are omitted.
void write_error_csv(std::ostream& out, const std::vector<HomogenizationErrorRow>& rows);

}  // namespace poincare
