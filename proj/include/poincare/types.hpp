#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace poincare {

using Real = double;
using Complex = std::complex<double>;
using Point = std::array<double, 2>;

/// Quasi-momentum in [0,1)^2, in units of the domain period.
struct Eta {
  double e1 = 0.0;
  double e2 = 0.0;

  bool is_zero() const { return e1 == 0.0 && e2 == 0.0; }
  friend bool operator==(const Eta&, const Eta&) = default;
};

using VectorR = Eigen::VectorXd;
using VectorC = Eigen::VectorXcd;
using MatrixR = Eigen::MatrixXd;
using MatrixC = Eigen::MatrixXcd;
using SparseR = Eigen::SparseMatrix<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

/// Classification of a real symmetric 2x2 tensor (or of the real part of a
/// complex one).
enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite, Degenerate, Complex };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::NegativeDefinite: return "NegativeDefinite";
    case Definiteness::Indefinite: return "Indefinite";
    case Definiteness::Degenerate: return "Degenerate";
    case Definiteness::Complex: return "Complex";
  }
  return "?";
}

constexpr double kPi = 3.14159265358979323846;

// Errors. The CLI maps ConfigError -> 2, NumericalError/GeometryError -> 3,
// NearResonanceError -> 4.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when the (shifted) system is singular for the requested right-hand
/// side. `distance` is the estimated distance in the conductivity variable a
/// (or in lambda, see `in_lambda`) to the nearest exciting eigenvalue.
class NearResonanceError : public NumericalError {
 public:
  NearResonanceError(const std::string& what, double distance, bool in_lambda)
      : NumericalError(what), distance_(distance), in_lambda_(in_lambda) {}

  double distance() const { return distance_; }
  bool in_lambda() const { return in_lambda_; }

 private:
  double distance_;
  bool in_lambda_;
};

}  // namespace poincare
