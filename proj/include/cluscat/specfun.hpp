#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cluscat/geom.hpp"

namespace cluscat {
namespace specfun {

inline constexpr int kMaxOrder = 120;
inline constexpr double kSmallArg = 1e-6;

namespace detail {

inline void check_order(int n) {
  if (n < 0 || n > kMaxOrder)
    throw std::domain_error("specfun: order outside [0, " +
                            std::to_string(kMaxOrder) + "]");
}

inline void check_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error("specfun: non-finite argument");
  if (std::abs(z.imag()) > 700.0)
    throw std::overflow_error("specfun: |Im z| too large, exp would overflow");
}

/// j_n(z) for |z| near zero: leading series terms, no cancellation.
inline Complex sph_j_taylor(int n, Complex z) {
  double dfact = 1.0;  // (2n+1)!!
  for (int m = 1; m <= n; ++m) dfact *= 2 * m + 1;
  Complex zn = 1.0;
  for (int m = 0; m < n; ++m) zn *= z;
  Complex z2 = z * z;
  return zn / dfact *
         (1.0 - z2 / (2.0 * (2 * n + 3)) +
          z2 * z2 / (8.0 * (2 * n + 3) * (2 * n + 5)));
}

}  // namespace detail

/// j_0 .. j_L for complex z. Forward recurrence when |z| > L, otherwise
/// Miller backward recurrence normalized by the directly computed j_0.
inline std::vector<Complex> sph_j_array(int L, Complex z) {
  detail::check_order(L);
  detail::check_finite(z);
  std::vector<Complex> j(L + 1);
  double az = std::abs(z);

  if (az < kSmallArg) {
    for (int n = 0; n <= L; ++n) j[n] = detail::sph_j_taylor(n, z);
    return j;
  }

  Complex j0 = std::sin(z) / z;
  if (L == 0) {
    j[0] = j0;
    return j;
  }
  Complex j1 = std::sin(z) / (z * z) - std::cos(z) / z;

  if (az > static_cast<double>(L)) {
    j[0] = j0;
    j[1] = j1;
    for (int n = 1; n < L; ++n)
      j[n + 1] = (2.0 * n + 1.0) / z * j[n] - j[n - 1];
  } else {
    int M = L + 16 + static_cast<int>(az);
    Complex fp = 0.0, f = 1e-30;
    for (int n = M; n >= 1; --n) {
      Complex fm = (2.0 * n + 1.0) / z * f - fp;
      fp = f;
      f = fm;
      if (n - 1 <= L) j[n - 1] = f;
      // rescale to dodge overflow of the growing minimal solution
      if (std::abs(f) > 1e250) {
        double s = 1e-250;
        f *= s;
        fp *= s;
        for (int m = n - 1; m <= L; ++m)
          if (m >= 0) j[m] *= s;
      }
    }
    Complex scale = j0 / j[0];
    for (int n = 0; n <= L; ++n) j[n] *= scale;
  }
  return j;
}

/// y_0 .. y_L by forward recurrence (stable: y grows with order).
inline std::vector<Complex> sph_y_array(int L, Complex z) {
  detail::check_order(L);
  detail::check_finite(z);
  if (z == 0.0) throw std::domain_error("sph_y: singular at z = 0");
  std::vector<Complex> y(L + 1);
  y[0] = -std::cos(z) / z;
  if (L >= 1) y[1] = -std::cos(z) / (z * z) - std::sin(z) / z;
  for (int n = 1; n < L; ++n)
    y[n + 1] = (2.0 * n + 1.0) / z * y[n] - y[n - 1];
  return y;
}

/// h_0^(1) .. h_L^(1), h_n = j_n + i y_n.
inline std::vector<Complex> sph_h1_array(int L, Complex z) {
  if (z == 0.0) throw std::domain_error("sph_hankel1: singular at z = 0");
  auto j = sph_j_array(L, z);
  auto y = sph_y_array(L, z);
  std::vector<Complex> h(L + 1);
  for (int n = 0; n <= L; ++n) h[n] = j[n] + I * y[n];
  return h;
}

inline Complex sph_bessel_j(int n, Complex z) { return sph_j_array(n, z)[n]; }

inline Complex sph_hankel1(int n, Complex z) { return sph_h1_array(n, z)[n]; }

/// f'_n(z) = f_{n-1}(z) - (n+1)/z f_n(z); f'_0(z) = -f_1(z).
inline Complex radial_derivative(const std::vector<Complex>& f, int n,
                                 Complex z) {
  if (n == 0) return -f[1];
  return f[n - 1] - (static_cast<double>(n) + 1.0) / z * f[n];
}

inline Complex sph_bessel_j_prime(int n, Complex z) {
  if (std::abs(z) < kSmallArg) {
    // j'_n near zero: n z^{n-1}/(2n+1)!! leading term; j'_0 = -j_1.
    if (n == 0) return -detail::sph_j_taylor(1, z);
    double dfact = 1.0;
    for (int m = 1; m <= n; ++m) dfact *= 2 * m + 1;
    Complex zn = 1.0;
    for (int m = 0; m < n - 1; ++m) zn *= z;
    Complex z2 = z * z;
    return zn / dfact *
           (static_cast<double>(n) -
            (static_cast<double>(n) + 2.0) * z2 / (2.0 * (2 * n + 3)));
  }
  auto j = sph_j_array(std::max(n, 1), z);
  return radial_derivative(j, n, z);
}

inline Complex sph_hankel1_prime(int n, Complex z) {
  auto h = sph_h1_array(std::max(n, 1), z);
  return radial_derivative(h, n, z);
}

/// P_n(x) by the three-term recurrence.
inline double legendre_p(int n, double x) {
  detail::check_order(n);
  if (std::abs(x) > 1.0) throw std::domain_error("legendre_p: |x| > 1");
  double pm1 = 1.0, p = x;
  if (n == 0) return 1.0;
  for (int m = 2; m <= n; ++m) {
    double pn = ((2.0 * m - 1.0) * x * p - (m - 1.0) * pm1) / m;
    pm1 = p;
    p = pn;
  }
  return p;
}

/// P_0..P_L and their derivatives at x; P'_n = P'_{n-2} + (2n-1) P_{n-1},
/// finite at x = +-1.
inline void legendre_all(int L, double x, std::vector<double>& p,
                         std::vector<double>& dp) {
  detail::check_order(L);
  if (std::abs(x) > 1.0) throw std::domain_error("legendre_all: |x| > 1");
  p.resize(L + 1);
  dp.resize(L + 1);
  p[0] = 1.0;
  dp[0] = 0.0;
  if (L == 0) return;
  p[1] = x;
  dp[1] = 1.0;
  for (int n = 2; n <= L; ++n) {
    p[n] = ((2.0 * n - 1.0) * x * p[n - 1] - (n - 1.0) * p[n - 2]) / n;
    dp[n] = dp[n - 2] + (2.0 * n - 1.0) * p[n - 1];
  }
}

}  // namespace specfun
}  // namespace cluscat
