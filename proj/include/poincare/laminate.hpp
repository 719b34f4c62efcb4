#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include "poincare/types.hpp"

namespace poincare {

/// Closed-form spectral data of the rank-1 laminate omega = {0 < y1 < theta}.

/// Discriminant of the transverse-mode quadratic beta^2 - beta + gamma = 0:
///   (cosh(2 pi (n+eta2)(2 theta-1)) - cos(2 pi eta1)) / (cosh(2 pi (n+eta2)) - cos(2 pi eta1)),
/// evaluated with exponentially scaled terms so that large n do not overflow.
/// Throws ConfigError for the degenerate sector n + eta2 = 0.
double laminate_delta(double theta, Eta eta, int n);

/// (beta_minus, beta_plus) = ((1 - sqrt(delta))/2, (1 + sqrt(delta))/2),
/// with beta_minus computed as 1 - beta_plus so the sum is exactly 1.
std::pair<double, double> laminate_bloch_pair(double theta, Eta eta, int n);

/// 4x4 transmission determinant of the transverse ODE at spectral value
/// beta, each row scaled to unit norm. Vanishes exactly at the Bloch pair.
Complex laminate_transmission_determinant(double theta, Eta eta, int n, double beta);

enum class SectorRange {
  Natural,  ///< n = 0..n_max, the enumeration of the closed-form spectrum.
  Integer,  ///< n in Z with |n + eta2| <= n_max + 1/2: the multiplicities a
            ///< periodic discretization sees (n and -n-2 eta2 give equal values).
};

struct LaminateSpec {
  double theta = 0.5;
  int N = 1;
  int n_max = 0;
  SectorRange range = SectorRange::Natural;
};

/// Sorted values of sigma(T_N): {0, 1-theta, 1} once each, plus the Bloch
/// pair of every nondegenerate sector eta = j/N, j in {0..N-1}^2, with one
/// entry per sector (multiset).
std::vector<double> laminate_spectrum(const LaminateSpec& spec);

/// Nontrivial values at a single quasi-momentum (pairs of all nondegenerate
/// sectors in range), plus 1 - theta when eta = 0. Sorted.
std::vector<double> laminate_bloch_values(double theta, Eta eta, int n_max, SectorRange range);

struct LaminateTensor {
  Complex lambda_minus;  ///< (theta/a + 1 - theta)^-1, the e1 e1 entry
  Complex lambda_plus;   ///< a theta + 1 - theta, the e2 e2 entry
  Definiteness regime = Definiteness::PositiveDefinite;
};

/// Homogenized tensor diag(lambda_minus, lambda_plus) and its regime.
/// Throws NumericalError at a = -theta/(1-theta) (degenerate) and ConfigError at a = 0.
LaminateTensor laminate_tensor(double theta, Complex a);

/// Regime of a real conductivity a by the explicit interval lists
/// (theta < 1/2, theta = 1/2, theta > 1/2). Endpoints are Degenerate.
Definiteness laminate_regime(double theta, double a);

/// Slopes (A, C) of the piecewise-linear first cell function on (0,theta) and (theta,1).
std::pair<Complex, Complex> laminate_cell_slopes(double theta, Complex a);

/// a_n^+ and a_n^- for n >= 1, evaluated in scaled form.
std::pair<double, double> laminate_exceptional_pair(double theta, int n);

/// {-theta/(1-theta), 0} together with a_n^+- for n = 1..n_max, sorted.
std::vector<double> laminate_exceptional(double theta, int n_max);

/// CSV "theta,eta1,eta2,n,beta_minus,beta_plus" for n = 0..n_max at each eta,
/// skipping the degenerate sector n + eta2 = 0.
void write_oracle_csv(std::ostream& out, double theta, const std::vector<Eta>& etas, int n_max);

/// Discrete Bloch decomposition of samples on an N-periodic grid.
/// samples(p1, p2) is the value at x = (p1, p2) / (N m). Coefficient j (index
/// j1 + N j2) is an m x m array over the cell grid y = q / m, with
///   u(x) = sum_j u_j(N x) exp(2 i pi j . x).
struct BlochCoefficients {
  int N = 1;
  int m = 1;
  std::vector<MatrixC> coeff;
};
BlochCoefficients bloch_decompose(const MatrixC& samples, int N);
MatrixC bloch_reconstruct(const BlochCoefficients& c);

/// Grid L2 inner product: mean of u * conj(v).
Complex grid_inner(const MatrixC& u, const MatrixC& v);

}  // namespace poincare
