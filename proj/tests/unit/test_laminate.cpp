#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "poincare/laminate.hpp"

using namespace poincare;

TEST_CASE("discriminant and Bloch pair at the reference point") {
  const double delta = laminate_delta(0.5, {0.25, 0.5}, 0);
  CHECK(delta == doctest::Approx(1.0 / std::cosh(kPi)).epsilon(1e-13));
  CHECK(delta == doctest::Approx(0.0862664).epsilon(1e-6));
  const auto [lo, hi] = laminate_bloch_pair(0.5, {0.25, 0.5}, 0);
  CHECK(std::abs(lo - 0.353144) < 1e-6);
  CHECK(std::abs(hi - 0.646856) < 1e-6);
  CHECK(lo + hi == 1.0);
  CHECK_THROWS_AS(laminate_delta(0.5, {0.25, 0.0}, 0), ConfigError);
}

TEST_CASE("theta = 1/2 numerator is 1 - cos") {
  for (int n : {0, 1, 3})
    for (double e2 : {0.2, 0.5}) {
      const double e1 = 0.3;
      const double expected = (1 - std::cos(2 * kPi * e1)) / (std::cosh(2 * kPi * (n + e2)) - std::cos(2 * kPi * e1));
      CHECK(laminate_delta(0.5, {e1, e2}, n) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("discriminant stays in (0,1) and pairs solve the transmission problem") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double theta = 0.05 + 0.9 * u(rng);
    const Eta eta{u(rng), 0.01 + 0.98 * u(rng)};
    const int n = static_cast<int>(u(rng) * 4);
    const double d = laminate_delta(theta, eta, n);
    CHECK(d > 0.0);
    CHECK(d < 1.0);
    const auto [lo, hi] = laminate_bloch_pair(theta, eta, n);
    if (i < 40) {
      CHECK(std::abs(laminate_transmission_determinant(theta, eta, n, lo)) < 1e-9);
      CHECK(std::abs(laminate_transmission_determinant(theta, eta, n, hi)) < 1e-9);
    }
  }
  // Off the pair the determinant does not vanish.
  CHECK(std::abs(laminate_transmission_determinant(0.5, {0.25, 0.5}, 0, 0.45)) > 1e-5);
}

TEST_CASE("pairs accumulate at one half") {
  const auto [lo, hi] = laminate_bloch_pair(0.5, {0.25, 0.5}, 5);
  CHECK(std::abs(lo - 0.5) < 1e-6);
  CHECK(std::abs(hi - 0.5) < 1e-6);
  // No overflow for very large n.
  const auto [l2, h2] = laminate_bloch_pair(0.3, {0.1, 0.2}, 400);
  CHECK(std::isfinite(l2));
  CHECK(l2 + h2 == 1.0);
}

TEST_CASE("finite laminate spectrum") {
  const auto s = laminate_spectrum({0.5, 1, 0, SectorRange::Natural});
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 0.5);
  CHECK(s[2] == 1.0);
  const auto s2 = laminate_spectrum({0.5, 2, 0, SectorRange::Natural});
  CHECK(s2.size() > s.size());
  // Raising n_max only adds values closer to 1/2.
  const auto a = laminate_spectrum({0.3, 3, 1, SectorRange::Natural});
  const auto b = laminate_spectrum({0.3, 3, 2, SectorRange::Natural});
  double far_a = 0.0;
  for (double v : a)
    if (v > 0 && v < 1 && std::abs(v - 0.7) > 1e-12) far_a = std::max(far_a, std::abs(v - 0.5));
  std::vector<double> added;
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(added));
  CHECK(!added.empty());
  for (double v : added) CHECK(std::abs(v - 0.5) < far_a);
}

TEST_CASE("laminate tensor and regimes") {
  const auto t = laminate_tensor(0.5, 2.0);
  CHECK(std::abs(t.lambda_minus - 4.0 / 3.0) < 1e-15);
  CHECK(std::abs(t.lambda_plus - 1.5) < 1e-15);
  const auto one = laminate_tensor(0.3, 1.0);
  CHECK(std::abs(one.lambda_minus - 1.0) < 1e-15);
  CHECK(std::abs(one.lambda_plus - 1.0) < 1e-15);
  const auto neg = laminate_tensor(1.0 / 3.0, -1.0);
  CHECK(neg.lambda_minus.real() > 0);
  CHECK(neg.lambda_plus.real() > 0);
  CHECK(neg.regime == Definiteness::PositiveDefinite);
  CHECK_THROWS_AS(laminate_tensor(0.5, -1.0), NumericalError);
  CHECK_THROWS_AS(laminate_tensor(0.5, 0.0), ConfigError);

  CHECK(laminate_regime(1.0 / 3.0, -0.25) == Definiteness::Indefinite);
  CHECK(laminate_regime(1.0 / 3.0, -1.0) == Definiteness::PositiveDefinite);
  CHECK(laminate_regime(2.0 / 3.0, -1.0) == Definiteness::NegativeDefinite);
  CHECK(laminate_regime(1.0 / 3.0, -0.5) == Definiteness::Degenerate);
  CHECK(laminate_regime(0.5, -1.0) == Definiteness::Degenerate);
}

TEST_CASE("exceptional values") {
  const auto e = laminate_exceptional(0.5, 3);
  CHECK(std::find(e.begin(), e.end(), -1.0) != e.end());
  CHECK(std::find(e.begin(), e.end(), 0.0) != e.end());
  double prev = INFINITY;
  for (int n = 1; n <= 20; ++n) {
    const auto [p, m] = laminate_exceptional_pair(0.3, n);
    const double d = std::max(std::abs(p + 1), std::abs(m + 1));
    CHECK(d <= prev);
    prev = d;
  }
  CHECK(prev < 1e-10);
  CHECK(1 - 1 / (1 - 0.3) == doctest::Approx(-0.3 / 0.7));
}

TEST_CASE("Bloch decomposition") {
  const int N = 3, m = 4, n = N * m;
  MatrixC c = MatrixC::Constant(n, n, 2.0);
  auto bc = bloch_decompose(c, N);
  for (int j = 1; j < N * N; ++j) CHECK(bc.coeff[j].cwiseAbs().maxCoeff() < 1e-14);

  MatrixC mode(n, n);
  for (int p1 = 0; p1 < n; ++p1)
    for (int p2 = 0; p2 < n; ++p2) mode(p1, p2) = std::exp(Complex(0, 2 * kPi * (1.0 * p1 + 2.0 * p2) / N / m));
  bc = bloch_decompose(mode, N);
  for (int j = 0; j < N * N; ++j) {
    const double mx = bc.coeff[j].cwiseAbs().maxCoeff();
    if (j == 1 + N * 2)
      CHECK(mx > 0.5);
    else
      CHECK(mx < 1e-12);
  }

  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  MatrixC r(n, n);
  for (auto& x : r.reshaped()) x = {g(rng), g(rng)};
  CHECK((bloch_reconstruct(bloch_decompose(r, N)) - r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("oracle csv") {
  std::ostringstream os;
  write_oracle_csv(os, 0.5, {{0.25, 0.5}, {0.5, 0.0}}, 1);
  const std::string s = os.str();
  CHECK(s.rfind("theta,eta1,eta2,n,beta_minus,beta_plus\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 2 + 1);
}
