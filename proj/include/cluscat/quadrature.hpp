#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cluscat/geom.hpp"

namespace cluscat {

/// Gauss-Legendre nodes/weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      // P_n(t) and P'_n(t)
      double pm1 = 1.0, p = t;
      for (int m = 2; m <= n; ++m) {
        double pn = ((2.0 * m - 1.0) * t * p - (m - 1.0) * pm1) / m;
        pm1 = p;
        p = pn;
      }
      double dp = n * (t * p - pm1) / (t * t - 1.0);
      double dt = -p / dp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double pm1 = 1.0, p = t;
    for (int m = 2; m <= n; ++m) {
      double pn = ((2.0 * m - 1.0) * t * p - (m - 1.0) * pm1) / m;
      pm1 = p;
      p = pn;
    }
    double dp = n * (t * p - pm1) / (t * t - 1.0);
    x[n - 1 - i] = t;
    w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) crossed
/// with the uniform trapezoid in phi. Exact for spherical polynomials of
/// degree <= 2 n_theta - 1 in cos(theta).
struct SphericalGrid {
  std::vector<Vec3> nodes;      // unit vectors
  std::vector<double> weights;  // sum to 4 pi
  int n_theta = 0;
  int n_phi = 0;
};

inline SphericalGrid sphere_grid(int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 4)
    throw std::domain_error("sphere_grid: need n_theta >= 2, n_phi >= 4");
  std::vector<double> ct, wt;
  gauss_legendre(n_theta, ct, wt);
  SphericalGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  g.weights.reserve(static_cast<size_t>(n_theta) * n_phi);
  double wphi = 2.0 * PI / n_phi;
  for (int it = 0; it < n_theta; ++it) {
    double c = ct[it];
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int ip = 0; ip < n_phi; ++ip) {
      double phi = 2.0 * PI * ip / n_phi;
      g.nodes.push_back({s * std::cos(phi), s * std::sin(phi), c});
      g.weights.push_back(wt[it] * wphi);
    }
  }
  return g;
}

template <typename F>
Complex integrate_sphere(F&& f, const SphericalGrid& grid) {
  Complex sum = 0.0;
  for (size_t q = 0; q < grid.nodes.size(); ++q) {
    Complex v = f(grid.nodes[q]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error("integrate_sphere: non-finite sample at node " +
                               std::to_string(q));
    sum += grid.weights[q] * v;
  }
  return sum;
}

/// Gauss-Legendre nodes on [r0, r1].
struct RadialGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline RadialGrid radial_grid(double r0, double r1, int n) {
  if (!(r0 >= 0.0) || !(r1 > r0))
    throw std::domain_error("radial_grid: need 0 <= r0 < r1");
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  RadialGrid g;
  g.nodes.resize(n);
  g.weights.resize(n);
  double mid = 0.5 * (r0 + r1), half = 0.5 * (r1 - r0);
  for (int i = 0; i < n; ++i) {
    g.nodes[i] = mid + half * x[i];
    g.weights[i] = half * w[i];
  }
  return g;
}

/// Radial nodes on [r0, r1] split into geometrically graded panels toward r0,
/// for integrands with an inverse-power singularity just below r0.
inline RadialGrid radial_grid_graded(double r0, double r1, int panels,
                                     int n_per_panel) {
  if (!(r0 > 0.0) || !(r1 > r0))
    throw std::domain_error("radial_grid_graded: need 0 < r0 < r1");
  RadialGrid g;
  double ratio = std::pow(r1 / r0, 1.0 / panels);
  double a = r0;
  for (int p = 0; p < panels; ++p) {
    double b = (p == panels - 1) ? r1 : a * ratio;
    RadialGrid panel = radial_grid(a, b, n_per_panel);
    g.nodes.insert(g.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    g.weights.insert(g.weights.end(), panel.weights.begin(),
                     panel.weights.end());
    a = b;
  }
  return g;
}

/// Integral of a volume field over the spherical shell r0 <= |r-center| <= r1.
template <typename F>
Complex integrate_ball_shell(F&& f, const Vec3& center, const RadialGrid& rad,
                             const SphericalGrid& ang) {
  Complex sum = 0.0;
  for (size_t ir = 0; ir < rad.nodes.size(); ++ir) {
    double r = rad.nodes[ir];
    double wr = rad.weights[ir] * r * r;
    for (size_t q = 0; q < ang.nodes.size(); ++q) {
      Complex v = f(center + r * ang.nodes[q]);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error(
            "integrate_ball_shell: non-finite sample at node " +
            std::to_string(q));
      sum += wr * ang.weights[q] * v;
    }
  }
  return sum;
}

/// Integral over a ball B(c; R) minus an excluded ball B(a; eps), with a
/// inside B(c; R). Angular directions are centered at a; the outer radial
/// limit along direction n is the distance from a to the sphere |r-c| = R.
template <typename F>
Complex integrate_ball_minus_ball(F&& f, const Vec3& c, double R, const Vec3& a,
                                  double eps, const SphericalGrid& ang,
                                  int panels, int n_per_panel) {
  Vec3 offset = c - a;
  double d = offset.norm();
  if (!(d < R))
    throw std::domain_error("integrate_ball_minus_ball: a not inside ball");
  Complex sum = 0.0;
  for (size_t q = 0; q < ang.nodes.size(); ++q) {
    const Vec3& n = ang.nodes[q];
    // outer limit t: |a + t n - c| = R
    double proj = n.dot(offset);
    double t = proj + std::sqrt(R * R - (d * d - proj * proj));
    RadialGrid rad = radial_grid_graded(eps, t, panels, n_per_panel);
    Complex line = 0.0;
    for (size_t ir = 0; ir < rad.nodes.size(); ++ir) {
      double r = rad.nodes[ir];
      line += rad.weights[ir] * r * r * f(a + r * n);
    }
    if (!std::isfinite(line.real()) || !std::isfinite(line.imag()))
      throw std::runtime_error(
          "integrate_ball_minus_ball: non-finite sample at node " +
          std::to_string(q));
    sum += ang.weights[q] * line;
  }
  return sum;
}

}  // namespace cluscat
