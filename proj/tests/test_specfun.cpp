#include <doctest.h>

#include <cmath>

#include "cluscat/specfun.hpp"

using namespace cluscat;
namespace sf = cluscat::specfun;

TEST_CASE("real-argument values against the standard library") {
  for (double x : {0.5, 3.7, 20.3}) {
    auto j = sf::sph_j_array(10, x);
    auto y = sf::sph_y_array(10, x);
    for (int n = 0; n <= 10; ++n) {
      double jr = std::sph_bessel(n, x);
      double yr = std::sph_neumann(n, x);
      CHECK(std::abs(j[n] - jr) < 1e-12 * std::max(1.0, std::abs(jr)));
      CHECK(std::abs(y[n] - yr) < 1e-12 * std::max(1.0, std::abs(yr)));
    }
  }
}

TEST_CASE("wronskian j h' - j' h = i / z^2") {
  for (Complex z : {Complex{1.0, 0.5}, Complex{4.0, 2.0}, Complex{0.3, 0.0},
                    Complex{12.0, 0.7}}) {
    int L = 40;
    auto j = sf::sph_j_array(L, z);
    auto h = sf::sph_h1_array(L, z);
    for (int n = 0; n <= L; ++n) {
      Complex jp = sf::radial_derivative(j, n, z);
      Complex hp = sf::radial_derivative(h, n, z);
      Complex w = j[n] * hp - jp * h[n];
      Complex expect = I / (z * z);
      CHECK(std::abs(w - expect) < 1e-10 * std::abs(expect));
    }
  }
}

TEST_CASE("forward and backward recurrences agree") {
  Complex z{10.0, 0.4};
  auto back = sf::sph_j_array(40, z);   // |z| < L: Miller
  auto fwd = sf::sph_j_array(8, z);     // |z| > L: forward
  for (int n = 0; n <= 8; ++n)
    CHECK(std::abs(back[n] - fwd[n]) <
          1e-11 * std::max(1e-12, std::abs(fwd[n])));
}

TEST_CASE("small-argument series") {
  Complex z{1e-8, 0.0};
  auto j = sf::sph_j_array(3, z);
  CHECK(std::abs(j[0] - 1.0) < 1e-15);
  CHECK(std::abs(j[1] - z / 3.0) < 1e-23);
  CHECK(std::abs(sf::sph_bessel_j_prime(1, Complex{0.0, 0.0}) -
                 Complex{1.0 / 3.0, 0.0}) < 1e-15);
}

TEST_CASE("derivatives match finite differences") {
  Complex z{2.3, 0.8};
  double h = 1e-6;
  for (int n : {0, 1, 4, 9}) {
    Complex fd = (sf::sph_bessel_j(n, z + h) - sf::sph_bessel_j(n, z - h)) /
                 (2.0 * h);
    CHECK(std::abs(sf::sph_bessel_j_prime(n, z) - fd) < 1e-8);
    Complex fdh =
        (sf::sph_hankel1(n, z + h) - sf::sph_hankel1(n, z - h)) / (2.0 * h);
    CHECK(std::abs(sf::sph_hankel1_prime(n, z) - fdh) <
          1e-7 * std::max(1.0, std::abs(fdh)));
  }
}

TEST_CASE("legendre values and derivatives") {
  CHECK(sf::legendre_p(5, 0.3) == doctest::Approx(std::legendre(5, 0.3)));
  std::vector<double> p, dp;
  sf::legendre_all(12, 0.47, p, dp);
  for (int n = 0; n <= 12; ++n) {
    CHECK(p[n] == doctest::Approx(std::legendre(n, 0.47)).epsilon(1e-13));
    double h = 1e-6;
    double fd = (std::legendre(n, 0.47 + h) - std::legendre(n, 0.47 - h)) /
                (2.0 * h);
    CHECK(dp[n] == doctest::Approx(fd).epsilon(1e-7));
  }
  sf::legendre_all(8, 1.0, p, dp);
  for (int n = 0; n <= 8; ++n) CHECK(p[n] == doctest::Approx(1.0));
  sf::legendre_all(8, -1.0, p, dp);
  for (int n = 0; n <= 8; ++n)
    CHECK(p[n] == doctest::Approx(n % 2 == 0 ? 1.0 : -1.0));
}

TEST_CASE("domain and overflow errors") {
  CHECK_THROWS_AS(sf::sph_j_array(121, Complex{1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(sf::sph_j_array(5, Complex{1.0, 800.0}), std::overflow_error);
  CHECK_THROWS_AS(sf::sph_h1_array(5, Complex{0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(sf::legendre_p(3, 1.5), std::domain_error);
}
