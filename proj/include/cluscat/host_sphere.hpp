#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cluscat/fields.hpp"
#include "cluscat/geom.hpp"
#include "cluscat/media.hpp"
#include "cluscat/pattern.hpp"
#include "cluscat/specfun.hpp"

namespace cluscat {

struct HostSphere {
  Vec3 center;
  double radius = 0.0;  // [m]
};

enum class SourceKind { Interior, Exterior };

/// Radial family carried by an axisymmetric expansion at the evaluation
/// radius: regular (spherical Bessel j) or outgoing (spherical Hankel h1).
enum class RadialKind { Regular, Outgoing };

/// Incident coefficients of the spherical-wave addition expansion about the
/// sphere center: A e^{ik|r-a|}/|r-a| = A ik sum_n (2n+1) j_n(k r_<)
/// h_n(k r_>) P_n(cos gamma). `eval_side` names the family used at the
/// evaluation radius; the returned a_n pair with it, i.e.
/// u = sum_n a_n {j_n|h_n}(k r) P_n(cos gamma).
inline std::vector<Complex> expand_source(Complex A, Complex k, double d,
                                          RadialKind eval_side, int L) {
  if (d < 0.0) throw std::domain_error("expand_source: d must be >= 0");
  if (L < 1) throw std::domain_error("expand_source: L must be >= 1");
  std::vector<Complex> a(L + 1);
  if (eval_side == RadialKind::Outgoing) {
    auto j = specfun::sph_j_array(L, k * d);
    for (int n = 0; n <= L; ++n)
      a[n] = A * I * k * (2.0 * n + 1.0) * j[n];
  } else {
    if (d == 0.0)
      throw std::domain_error("expand_source: source at center has no regular-"
                              "side expansion");
    auto h = specfun::sph_h1_array(L, k * d);
    for (int n = 0; n <= L; ++n)
      a[n] = A * I * k * (2.0 * n + 1.0) * h[n];
  }
  return a;
}

/// Truncated axisymmetric series solution of the penetrable-sphere
/// transmission problem for a single point source.
struct SeriesSolution {
  SourceKind source_kind = SourceKind::Interior;
  Vec3 center;
  double radius = 0.0;
  Vec3 axis{0.0, 0.0, 1.0};   // unit vector, center -> source
  double source_distance = 0.0;
  Complex amplitude{};
  int L = 0;
  DerivedMedium host;
  DerivedMedium exterior;
  std::vector<Complex> incident;        // expansion coeffs of the source wave
  std::vector<Complex> interior_coeffs; // j_n(k_h r) family inside the sphere
  std::vector<Complex> exterior_coeffs; // h_n(k_0 r) family outside
  bool converged = false;
  double tail_ratio = 0.0;

  void require_converged() const {
    if (!converged)
      throw std::runtime_error(
          "SeriesSolution: truncation did not converge (tail ratio " +
          std::to_string(tail_ratio) + ")");
  }
};

/// L = ceil(|k_h| R + |k_0| R) + 12, clamped to [16, 120].
inline int default_truncation(const DerivedMedium& host_dm,
                              const DerivedMedium& ext_dm, double radius) {
  double s = std::abs(host_dm.k) * radius + std::abs(ext_dm.k) * radius;
  int L = static_cast<int>(std::ceil(s)) + 12;
  return std::clamp(L, 16, specfun::kMaxOrder);
}

namespace detail {

/// Relative size of the last per-degree term of the boundary values. The raw
/// coefficients are not comparable across degrees (the j_n family shrinks and
/// the h_n family grows with n), so each coefficient is weighted by its radial
/// function at the sphere surface.
inline double tail_ratio_of(const std::vector<Complex>& interior,
                            const std::vector<Complex>& exterior,
                            const std::vector<Complex>& jh,
                            const std::vector<Complex>& h0R) {
  double mx = 0.0, last = 0.0;
  const size_t L = interior.size() - 1;
  for (size_t n = 0; n <= L; ++n) {
    double m = std::max(std::abs(interior[n] * jh[n]),
                        std::abs(exterior[n] * h0R[n]));
    mx = std::max(mx, m);
    if (n == L) last = m;
  }
  if (mx == 0.0) return 0.0;
  return last / mx;
}

}  // namespace detail

/// Solves the per-degree transmission systems on the sphere surface:
/// u^0 = u^h and (beta_h/rho_0) du^0/dn = du^h/dn.
inline SeriesSolution solve_host(SourceKind kind, Complex amplitude,
                                 const Vec3& source_pos, const HostSphere& host,
                                 const DerivedMedium& host_dm,
                                 const DerivedMedium& ext_dm, int L) {
  if (!(host.radius > 0.0))
    throw std::domain_error("solve_host: host radius must be > 0");
  if (host_dm.omega != ext_dm.omega)
    throw std::domain_error("solve_host: media derived at different omega");

  SeriesSolution sol;
  sol.source_kind = kind;
  sol.center = host.center;
  sol.radius = host.radius;
  sol.amplitude = amplitude;
  sol.L = L;
  sol.host = host_dm;
  sol.exterior = ext_dm;

  Vec3 rel = source_pos - host.center;
  double d = rel.norm();
  sol.source_distance = d;
  sol.axis = (d > 0.0) ? rel / d : Vec3{0.0, 0.0, 1.0};

  if (kind == SourceKind::Interior && !(d < host.radius))
    throw std::domain_error("solve_host: interior source not inside sphere");
  if (kind == SourceKind::Exterior && !(d > host.radius))
    throw std::domain_error("solve_host: exterior source not outside sphere");

  const Complex kh = host_dm.k, k0 = ext_dm.k;
  const Complex rho_rel = host_dm.beta / ext_dm.rho;  // varrho_h
  const double R = host.radius;

  // the series converges geometrically with ratio d/R (interior source) or
  // R/d (exterior source); extend the truncation until the tail settles
  for (;; L = std::min(L + 8, specfun::kMaxOrder)) {
  sol.L = L;

  auto jh = specfun::sph_j_array(L, kh * R);
  auto hh = specfun::sph_h1_array(L, kh * R);
  auto j0R = specfun::sph_j_array(L, k0 * R);
  auto h0R = specfun::sph_h1_array(L, k0 * R);

  sol.interior_coeffs.assign(L + 1, Complex{});
  sol.exterior_coeffs.assign(L + 1, Complex{});

  if (kind == SourceKind::Interior) {
    // incident pairs with h_n(k_h r) at r = R > d
    sol.incident = expand_source(amplitude, kh, d, RadialKind::Outgoing, L);
    for (int n = 0; n <= L; ++n) {
      Complex jhp = specfun::radial_derivative(jh, n, kh * R);
      Complex hhp = specfun::radial_derivative(hh, n, kh * R);
      Complex h0p = specfun::radial_derivative(h0R, n, k0 * R);
      // t h0(k0R) - c jh(khR) = p hh(khR)
      // rho_rel k0 t h0' - kh c jh'  = p kh hh'
      Complex a11 = h0R[n], a12 = -jh[n];
      Complex a21 = rho_rel * k0 * h0p, a22 = -kh * jhp;
      Complex b1 = sol.incident[n] * hh[n];
      Complex b2 = sol.incident[n] * kh * hhp;
      Complex det = a11 * a22 - a12 * a21;
      double scale = std::max(std::abs(a11 * a22), std::abs(a12 * a21));
      if (!(std::abs(det) > 1e-14 * scale))
        throw std::runtime_error(
            "solve_host: singular transmission system at degree " +
            std::to_string(n));
      sol.exterior_coeffs[n] = (b1 * a22 - a12 * b2) / det;
      sol.interior_coeffs[n] = (a11 * b2 - b1 * a21) / det;
    }
  } else {
    // incident pairs with j_n(k_0 r) at r = R < d
    sol.incident = expand_source(amplitude, k0, d, RadialKind::Regular, L);
    for (int n = 0; n <= L; ++n) {
      Complex jhp = specfun::radial_derivative(jh, n, kh * R);
      Complex j0p = specfun::radial_derivative(j0R, n, k0 * R);
      Complex h0p = specfun::radial_derivative(h0R, n, k0 * R);
      // q j0(k0R) + s h0(k0R) = w jh(khR)
      // rho_rel k0 (q j0' + s h0') = kh w jh'
      Complex a11 = h0R[n], a12 = -jh[n];
      Complex a21 = rho_rel * k0 * h0p, a22 = -kh * jhp;
      Complex b1 = -sol.incident[n] * j0R[n];
      Complex b2 = -sol.incident[n] * rho_rel * k0 * j0p;
      Complex det = a11 * a22 - a12 * a21;
      double scale = std::max(std::abs(a11 * a22), std::abs(a12 * a21));
      if (!(std::abs(det) > 1e-14 * scale))
        throw std::runtime_error(
            "solve_host: singular transmission system at degree " +
            std::to_string(n));
      sol.exterior_coeffs[n] = (b1 * a22 - a12 * b2) / det;  // s_n
      sol.interior_coeffs[n] = (a11 * b2 - b1 * a21) / det;  // w_n
    }
  }

  sol.tail_ratio = detail::tail_ratio_of(sol.interior_coeffs,
                                         sol.exterior_coeffs, jh, h0R);
  sol.converged = sol.tail_ratio < 1e-10;
  if (sol.converged || L >= specfun::kMaxOrder) break;
  }
  return sol;
}

namespace detail {

/// Value and gradient of sum_n a_n R_n(k rho) P_n(cos gamma) about `center`
/// with polar axis `axis`.
inline FieldSample eval_axisymmetric(const std::vector<Complex>& a, Complex k,
                                     RadialKind kind, const Vec3& center,
                                     const Vec3& axis, const Vec3& r,
                                     Region region) {
  const int L = static_cast<int>(a.size()) - 1;
  Vec3 rel = r - center;
  double rho = rel.norm();

  if (rho < 1e-14) {
    if (kind == RadialKind::Outgoing)
      throw std::domain_error("eval_axisymmetric: singular at the center");
    // j_0 -> 1, and only the n=1 term contributes to the gradient
    FieldSample s;
    s.region = region;
    s.value = a[0];
    if (L >= 1) s.gradient = (a[1] * k / 3.0) * axis;
    return s;
  }

  Vec3 rhat = rel / rho;
  double c = std::clamp(rhat.dot(axis), -1.0, 1.0);

  std::vector<Complex> rad = (kind == RadialKind::Regular)
                                 ? specfun::sph_j_array(L, k * rho)
                                 : specfun::sph_h1_array(L, k * rho);
  std::vector<double> p, dp;
  specfun::legendre_all(L, c, p, dp);

  Complex val = 0.0, dval_r = 0.0, dval_c = 0.0;
  for (int n = 0; n <= L; ++n) {
    Complex radp = specfun::radial_derivative(rad, n, k * rho);
    val += a[n] * rad[n] * p[n];
    dval_r += a[n] * k * radp * p[n];
    dval_c += a[n] * rad[n] * dp[n];
  }

  // grad = dval_r rhat + dval_c * grad(cos gamma),
  // grad(cos gamma) = (axis - c rhat) / rho
  Vec3 gc = (axis - c * rhat) / rho;
  FieldSample s;
  s.region = region;
  s.value = val;
  s.gradient = dval_r * rhat + dval_c * gc;
  return s;
}

}  // namespace detail

/// Reconstruction of the expanded point-source wave (test utility).
inline FieldSample eval_expansion(const std::vector<Complex>& coeffs, Complex k,
                                  RadialKind eval_side, const Vec3& center,
                                  const Vec3& axis, const Vec3& r) {
  return detail::eval_axisymmetric(coeffs, k, eval_side, center, axis, r,
                                   Region::Exterior);
}

/// Scattered/radiated field outside the sphere (h_n family).
inline FieldSample eval_scattered_exterior(const SeriesSolution& sol,
                                           const Vec3& r) {
  sol.require_converged();
  return detail::eval_axisymmetric(sol.exterior_coeffs, sol.exterior.k,
                                   RadialKind::Outgoing, sol.center, sol.axis,
                                   r, Region::Exterior);
}

/// Response field inside the sphere (j_n family): the interior response for
/// an interior source, the transmitted field for an exterior one.
inline FieldSample eval_interior(const SeriesSolution& sol, const Vec3& r) {
  sol.require_converged();
  return detail::eval_axisymmetric(sol.interior_coeffs, sol.host.k,
                                   RadialKind::Regular, sol.center, sol.axis, r,
                                   Region::Host);
}

/// Far-field pattern of the exterior series, phase-referenced to the global
/// origin: g(r_hat) = e^{-i k0 r_hat . center} sum_n t_n (-i)^n P_n(cos gamma).
inline FarFieldPattern far_field(const SeriesSolution& sol,
                                 const SphericalGrid& grid) {
  sol.require_converged();
  if (!sol.exterior.lossless())
    throw std::domain_error("far_field: exterior medium must be lossless");
  double k0 = sol.exterior.k.real();

  FarFieldPattern pat;
  pat.grid = &grid;
  pat.k0 = k0;
  pat.samples.resize(grid.nodes.size());

  std::vector<Complex> phase(sol.L + 1);
  Complex f = 1.0;
  for (int n = 0; n <= sol.L; ++n) {
    phase[n] = f;  // (-i)^n
    f *= -I;
  }

  std::vector<double> p, dp;
  for (size_t q = 0; q < grid.nodes.size(); ++q) {
    const Vec3& rhat = grid.nodes[q];
    double c = std::clamp(rhat.dot(sol.axis), -1.0, 1.0);
    specfun::legendre_all(sol.L, c, p, dp);
    Complex g = 0.0;
    for (int n = 0; n <= sol.L; ++n)
      g += sol.exterior_coeffs[n] * phase[n] * p[n];
    pat.samples[q] = g * std::exp(-I * k0 * rhat.dot(sol.center));
  }
  return pat;
}

}  // namespace cluscat
