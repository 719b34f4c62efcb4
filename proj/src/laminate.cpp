#include "poincare/laminate.hpp"

#include <algorithm>
#include <cmath>

namespace poincare {

namespace {

bool degenerate_sector(Eta eta, int n) { return static_cast<double>(n) + eta.e2 == 0.0; }

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("laminate theta must lie in (0,1)");
}

void append_sector(std::vector<double>& out, double theta, Eta eta, int n) {
  const auto [lo, hi] = laminate_bloch_pair(theta, eta, n);
  out.push_back(lo);
  out.push_back(hi);
}

/// Sector indices n in range for transverse shift eta2.
std::vector<int> sector_indices(double eta2, int n_max, SectorRange range) {
  std::vector<int> ns;
  if (range == SectorRange::Natural) {
    for (int n = 0; n <= n_max; ++n) ns.push_back(n);
  } else {
    const double bound = n_max + 0.5 + 1e-12;
    for (int n = -n_max - 2; n <= n_max + 1; ++n)
      if (std::abs(n + eta2) <= bound) ns.push_back(n);
  }
  return ns;
}

}  // namespace

double laminate_delta(double theta, Eta eta, int n) {
  check_theta(theta);
  if (degenerate_sector(eta, n)) throw ConfigError("laminate_delta: degenerate sector n + eta2 = 0");
  // With t = 2 pi (n + eta2), s = t (2 theta - 1), phi = 2 pi eta1:
  //   cosh(s) - cos(phi) = 2 sinh^2(s/2) + 2 sin^2(phi/2);
  // numerator and denominator are both multiplied by 2 exp(-|t|).
  const double t = std::abs(2.0 * kPi * (n + eta.e2));
  const double s = std::abs(t * (2.0 * theta - 1.0));
  const double sphi = std::sin(kPi * eta.e1);
  const double trig = 4.0 * sphi * sphi * std::exp(-t);
  const double em_s = std::expm1(-s);
  const double em_t = std::expm1(-t);
  const double num = std::exp(s - t) * em_s * em_s + trig;
  const double den = em_t * em_t + trig;
  return num / den;
}

std::pair<double, double> laminate_bloch_pair(double theta, Eta eta, int n) {
  const double delta = laminate_delta(theta, eta, n);
  const double plus = 0.5 * (1.0 + std::sqrt(delta));
  return {1.0 - plus, plus};
}

Complex laminate_transmission_determinant(double theta, Eta eta, int n, double beta) {
  if (degenerate_sector(eta, n)) throw ConfigError("transmission determinant: degenerate sector");
  const Complex i(0.0, 1.0);
  const double k = 2.0 * kPi * (n + eta.e2);
  const Complex shift = 2.0 * i * kPi * eta.e1;
  const Complex r1 = -shift - k;
  const Complex r2 = -shift + k;
  const Complex d1 = r1 + shift;
  const Complex d2 = r2 + shift;
  const Complex e1 = std::exp(r1), e2 = std::exp(r2);
  const Complex t1 = std::exp(r1 * theta), t2 = std::exp(r2 * theta);
  Eigen::Matrix4cd m;
  m << 1.0, 1.0, -e1, -e2,                                                           //
      t1, t2, -t1, -t2,                                                              //
      (beta - 1.0) * d1, (beta - 1.0) * d2, -beta * d1 * e1, -beta * d2 * e2,        //
      (beta - 1.0) * d1 * t1, (beta - 1.0) * d2 * t2, -beta * d1 * t1, -beta * d2 * t2;
  for (int r = 0; r < 4; ++r) m.row(r) /= m.row(r).norm();
  return m.determinant();
}

std::vector<double> laminate_bloch_values(double theta, Eta eta, int n_max, SectorRange range) {
  check_theta(theta);
  std::vector<double> out;
  for (int n : sector_indices(eta.e2, n_max, range)) {
    if (degenerate_sector(eta, n)) {
      if (eta.e1 == 0.0) out.push_back(1.0 - theta);
      continue;
    }
    append_sector(out, theta, eta, n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> laminate_spectrum(const LaminateSpec& spec) {
  check_theta(spec.theta);
  if (spec.N < 1) throw ConfigError("laminate_spectrum: N must be >= 1");
  if (spec.n_max < 0) throw ConfigError("laminate_spectrum: n_max must be >= 0");
  std::vector<double> out{0.0, 1.0 - spec.theta, 1.0};
  for (int j2 = 0; j2 < spec.N; ++j2)
    for (int j1 = 0; j1 < spec.N; ++j1) {
      const Eta eta{static_cast<double>(j1) / spec.N, static_cast<double>(j2) / spec.N};
      for (int n : sector_indices(eta.e2, spec.n_max, spec.range))
        if (!degenerate_sector(eta, n)) append_sector(out, spec.theta, eta, n);
    }
  std::sort(out.begin(), out.end());
  return out;
}

Definiteness laminate_regime(double theta, double a) {
  check_theta(theta);
  if (a > 0.0) return Definiteness::PositiveDefinite;
  if (a == 0.0) return Definiteness::Degenerate;
  const double p = -theta / (1.0 - theta);
  const double q = -(1.0 - theta) / theta;
  const auto near = [a](double t) { return std::abs(a - t) <= 1e-12 * std::max(1.0, std::abs(a)); };
  if (near(p) || near(q)) return Definiteness::Degenerate;
  const double lo = std::min(p, q);
  const double hi = std::max(p, q);
  if (a > hi || a < lo) return Definiteness::Indefinite;
  // Between the two thresholds: positive definite for theta < 1/2 (where
  // q < p), negative definite for theta > 1/2.
  return theta < 0.5 ? Definiteness::PositiveDefinite : Definiteness::NegativeDefinite;
}

LaminateTensor laminate_tensor(double theta, Complex a) {
  check_theta(theta);
  if (a == Complex(0.0, 0.0)) throw ConfigError("laminate_tensor: a must be nonzero");
  const double crit = -theta / (1.0 - theta);
  if (std::abs(a - crit) <= 1e-12 * std::max(1.0, std::abs(a)))
    throw NumericalError("laminate_tensor: a = -theta/(1-theta), the tensor is degenerate");
  LaminateTensor t;
  t.lambda_minus = 1.0 / (theta / a + (1.0 - theta));
  t.lambda_plus = a * theta + (1.0 - theta);
  t.regime = a.imag() != 0.0 ? Definiteness::Complex : laminate_regime(theta, a.real());
  return t;
}

std::pair<Complex, Complex> laminate_cell_slopes(double theta, Complex a) {
  check_theta(theta);
  const double crit = theta / (1.0 - theta);
  if (std::abs(a + crit) <= 1e-12 * std::max(1.0, std::abs(a)))
    throw NumericalError("laminate cell problem has no solution at a = -theta/(1-theta)");
  // Flux continuity a (1 + A) = 1 + C with zero mean slope theta A + (1-theta) C = 0.
  const Complex A = (1.0 - a) / (a + crit);
  const Complex C = A * theta / (theta - 1.0);
  return {A, C};
}

std::pair<double, double> laminate_exceptional_pair(double theta, int n) {
  check_theta(theta);
  if (n < 1) throw ConfigError("laminate_exceptional_pair: n must be >= 1");
  // All terms multiplied by 2 exp(-t), t = 2 pi n, s = t (2 theta - 1); every
  // exponent below is non-positive.
  const double t = 2.0 * kPi * n;
  const double s = t * (2.0 * theta - 1.0);
  const double et = std::exp(-t);
  const double sinh_prod = 2.0 * (-std::expm1(-t)) * (std::exp((s - t) / 2.0) - std::exp(-(s + t) / 2.0));
  const double cosh_s = std::exp(s - t) + std::exp(-s - t);
  const double cosh_t = 1.0 + et * et;
  const double den = cosh_t - cosh_s;
  const double base = 4.0 * et - cosh_s - cosh_t;
  return {(base + sinh_prod) / den, (base - sinh_prod) / den};
}

std::vector<double> laminate_exceptional(double theta, int n_max) {
  check_theta(theta);
  std::vector<double> out{-theta / (1.0 - theta), 0.0};
  for (int n = 1; n <= n_max; ++n) {
    const auto [plus, minus] = laminate_exceptional_pair(theta, n);
    out.push_back(plus);
    out.push_back(minus);
  }
  std::sort(out.begin(), out.end());
  return out;
}

BlochCoefficients bloch_decompose(const MatrixC& samples, int N) {
  if (N < 1) throw ConfigError("bloch_decompose: N must be >= 1");
  if (samples.rows() != samples.cols() || samples.rows() % N != 0 || samples.rows() == 0)
    throw ConfigError("bloch_decompose: grid must be square with size divisible by N");
  const int m = static_cast<int>(samples.rows()) / N;
  BlochCoefficients c;
  c.N = N;
  c.m = m;
  c.coeff.assign(static_cast<size_t>(N) * N, MatrixC::Zero(m, m));
  const double inv = 1.0 / (static_cast<double>(N) * N);
  for (int j2 = 0; j2 < N; ++j2)
    for (int j1 = 0; j1 < N; ++j1) {
      MatrixC& u = c.coeff[j1 + N * j2];
      for (int q2 = 0; q2 < m; ++q2)
        for (int q1 = 0; q1 < m; ++q1) {
          Complex acc = 0.0;
          for (int k2 = 0; k2 < N; ++k2)
            for (int k1 = 0; k1 < N; ++k1) {
              const int p1 = q1 + k1 * m, p2 = q2 + k2 * m;
              const double x1 = static_cast<double>(p1) / (N * m), x2 = static_cast<double>(p2) / (N * m);
              acc += samples(p1, p2) * std::polar(1.0, -2.0 * kPi * (j1 * x1 + j2 * x2));
            }
          u(q1, q2) = acc * inv;
        }
    }
  return c;
}

MatrixC bloch_reconstruct(const BlochCoefficients& c) {
  const int N = c.N, m = c.m;
  MatrixC u = MatrixC::Zero(N * m, N * m);
  for (int p2 = 0; p2 < N * m; ++p2)
    for (int p1 = 0; p1 < N * m; ++p1) {
      const double x1 = static_cast<double>(p1) / (N * m), x2 = static_cast<double>(p2) / (N * m);
      Complex acc = 0.0;
      for (int j2 = 0; j2 < N; ++j2)
        for (int j1 = 0; j1 < N; ++j1)
          acc += c.coeff[j1 + N * j2](p1 % m, p2 % m) * std::polar(1.0, 2.0 * kPi * (j1 * x1 + j2 * x2));
      u(p1, p2) = acc;
    }
  return u;
}

Complex grid_inner(const MatrixC& u, const MatrixC& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw ConfigError("grid_inner: size mismatch");
  return (u.array() * v.conjugate().array()).sum() / static_cast<double>(u.size());
}

void write_oracle_csv(std::ostream& out, double theta, const std::vector<Eta>& etas, int n_max) {
  out << "theta,eta1,eta2,n,beta_minus,beta_plus\n";
  out.precision(15);
  for (const Eta& eta : etas)
    for (int n = 0; n <= n_max; ++n) {
      if (n == 0 && eta.e2 == 0.0) continue;
      const auto [lo, hi] = laminate_bloch_pair(theta, eta, n);
      out << theta << ',' << eta.e1 << ',' << eta.e2 << ',' << n << ',' << lo << ',' << hi << '\n';
    }
}

}  // namespace poincare
