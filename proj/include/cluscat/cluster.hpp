#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cluscat/fields.hpp"
#include "cluscat/host_sphere.hpp"
#include "cluscat/media.hpp"
#include "cluscat/pattern.hpp"

namespace cluscat {

/// Interior point source + penetrable host sphere + exterior point scatterers.
struct ClusterModel {
  HostSphere host;
  Medium host_medium;
  Medium exterior_medium;  // must be lossless
  PointSource source;      // strictly inside the host
  std::vector<PointScatterer> scatterers;  // strictly outside the host
  double omega = 0.0;

  void validate() const {
    host_medium.validate();
    exterior_medium.validate();
    if (!(host.radius > 0.0))
      throw std::domain_error("ClusterModel: host radius must be > 0");
    if (!(omega > 0.0)) throw std::domain_error("ClusterModel: omega must be > 0");
    if (!exterior_medium.lossless())
      throw std::domain_error("ClusterModel: exterior medium must be lossless");
    if (!((source.position - host.center).norm() < host.radius))
      throw std::domain_error("ClusterModel: source must lie inside the host");
    for (size_t i = 0; i < scatterers.size(); ++i) {
      if (!((scatterers[i].position - host.center).norm() > host.radius))
        throw std::domain_error("ClusterModel: scatterer " + std::to_string(i) +
                                " must lie outside the host");
      for (size_t j = 0; j < i; ++j)
        if ((scatterers[i].position - scatterers[j].position).norm() == 0.0)
          throw std::domain_error("ClusterModel: coincident scatterers " +
                                  std::to_string(j) + ", " + std::to_string(i));
    }
  }
};

/// Single-scatterer attribution of the assembled model. Cluster members are
/// indexed 0..N-1 with the point scatterers first and the host last; the
/// host's exterior field is its entire scattered field (response to the
/// interior source and to every point-scatterer wave).
struct Assembly {
  ClusterModel model;
  DerivedMedium host_dm;
  DerivedMedium ext_dm;
  int L = 0;
  SeriesSolution interior_solution;                // interior source vs host
  std::vector<SeriesSolution> scatterer_solutions; // scatterer wave vs host
  const SphericalGrid* grid = nullptr;
  std::vector<FarFieldPattern> patterns;           // one per cluster member

  size_t member_count() const { return model.scatterers.size() + 1; }
  size_t host_index() const { return model.scatterers.size(); }
  double k0() const { return ext_dm.k.real(); }

  /// Primary field of the interior source at a host-interior point.
  FieldSample primary_at(const Vec3& r) const {
    return spherical_wave(model.source.amplitude, model.source.position,
                          host_dm.k, r, Region::SourceRegion);
  }

  /// Per-member exterior fields at r (point-scatterer waves, then the host's
  /// full scattered exterior field). Their sum is the total exterior field.
  std::vector<FieldSample> exterior_fields_at(const Vec3& r) const {
    std::vector<FieldSample> out;
    out.reserve(member_count());
    for (const auto& sc : model.scatterers)
      out.push_back(
          spherical_wave(sc.strength, sc.position, ext_dm.k, r, Region::Exterior));
    FieldSample host = eval_scattered_exterior(interior_solution, r);
    for (const auto& sol : scatterer_solutions) {
      FieldSample s = eval_scattered_exterior(sol, r);
      host.value += s.value;
      host.gradient += s.gradient;
    }
    out.push_back(host);
    return out;
  }

  /// Per-member secondary fields at a host-interior point: transmitted field
  /// of each point scatterer, then the interior response to the source. The
  /// total host field is their sum plus primary_at(r).
  std::vector<FieldSample> host_secondary_fields_at(const Vec3& r) const {
    std::vector<FieldSample> out;
    out.reserve(member_count());
    for (const auto& sol : scatterer_solutions)
      out.push_back(eval_interior(sol, r));
    out.push_back(eval_interior(interior_solution, r));
    return out;
  }

  FieldSample total_exterior_at(const Vec3& r) const {
    auto f = exterior_fields_at(r);
    return sum_samples(f);
  }

  FieldSample total_host_at(const Vec3& r) const {
    auto f = host_secondary_fields_at(r);
    FieldSample total = sum_samples(f);
    FieldSample pr = primary_at(r);
    total.value += pr.value;
    total.gradient += pr.gradient;
    total.region = Region::Host;
    return total;
  }
};

/// Solves the per-source host problems and builds the attributed far-field
/// patterns. L <= 0 selects the default truncation.
inline Assembly assemble(const ClusterModel& model, const SphericalGrid& grid,
                         int L = 0) {
  model.validate();
  Assembly as;
  as.model = model;
  as.host_dm = derive(model.host_medium, model.omega);
  as.ext_dm = derive(model.exterior_medium, model.omega);
  as.L = (L > 0) ? L : default_truncation(as.host_dm, as.ext_dm,
                                          model.host.radius);
  as.grid = &grid;

  as.interior_solution =
      solve_host(SourceKind::Interior, model.source.amplitude,
                 model.source.position, model.host, as.host_dm, as.ext_dm, as.L);

  as.scatterer_solutions.reserve(model.scatterers.size());
  for (size_t j = 0; j < model.scatterers.size(); ++j) {
    try {
      as.scatterer_solutions.push_back(
          solve_host(SourceKind::Exterior, model.scatterers[j].strength,
                     model.scatterers[j].position, model.host, as.host_dm,
                     as.ext_dm, as.L));
    } catch (const std::exception& e) {
      throw std::runtime_error("assemble: host solve failed for scatterer " +
                               std::to_string(j) + ": " + e.what());
    }
  }

  double k0 = as.k0();
  for (const auto& sc : model.scatterers)
    as.patterns.push_back(point_source_pattern(sc.strength, sc.position, k0, grid));

  std::vector<FarFieldPattern> host_parts;
  host_parts.push_back(far_field(as.interior_solution, grid));
  for (const auto& sol : as.scatterer_solutions)
    host_parts.push_back(far_field(sol, grid));
  as.patterns.push_back(sum_patterns(host_parts));

  return as;
}

enum class FoldyMode { Fixed, SelfConsistent };

namespace detail {

/// Gaussian elimination with partial pivoting for small dense systems.
inline std::vector<Complex> solve_dense(std::vector<std::vector<Complex>> M,
                                        std::vector<Complex> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
    if (std::abs(M[piv][col]) == 0.0)
      throw std::runtime_error("solve_dense: singular system");
    std::swap(M[piv], M[col]);
    std::swap(b[piv], b[col]);
    for (size_t r = col + 1; r < n; ++r) {
      Complex f = M[r][col] / M[col][col];
      for (size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Complex> x(n);
  for (size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (size_t j = i + 1; j < n; ++j) s -= M[i][j] * x[j];
    x[i] = s / M[i][i];
  }
  return x;
}

}  // namespace detail

/// Scatterer strengths: fixed mode returns the configured strengths; the
/// self-consistent mode solves A_n = f_n u_exc(b_n) where u_exc is the host's
/// scattered exterior field plus all other scatterers' waves, by damped
/// fixed-point iteration with a dense-solve fallback.
inline std::vector<Complex> foldy_strengths(const ClusterModel& model,
                                            FoldyMode mode, double tol = 1e-12,
                                            int max_iter = 200, int L = 0) {
  model.validate();
  std::vector<Complex> A;
  A.reserve(model.scatterers.size());
  for (const auto& sc : model.scatterers) A.push_back(sc.strength);
  if (mode == FoldyMode::Fixed) return A;

  const size_t N = model.scatterers.size();
  for (size_t n = 0; n < N; ++n)
    if (!model.scatterers[n].has_monopole)
      throw std::domain_error(
          "foldy_strengths: self-consistent mode needs monopole_coefficient on "
          "scatterer " + std::to_string(n));
  if (N == 0) return A;

  DerivedMedium host_dm = derive(model.host_medium, model.omega);
  DerivedMedium ext_dm = derive(model.exterior_medium, model.omega);
  int Lt = (L > 0) ? L : default_truncation(host_dm, ext_dm, model.host.radius);
  Complex k0 = ext_dm.k;

  SeriesSolution src_sol =
      solve_host(SourceKind::Interior, model.source.amplitude,
                 model.source.position, model.host, host_dm, ext_dm, Lt);

  // unit-strength host responses, one per scatterer position
  std::vector<SeriesSolution> unit(N);
  for (size_t m = 0; m < N; ++m)
    unit[m] = solve_host(SourceKind::Exterior, 1.0,
                         model.scatterers[m].position, model.host, host_dm,
                         ext_dm, Lt);

  std::vector<Complex> E(N);
  std::vector<std::vector<Complex>> K(N, std::vector<Complex>(N));
  for (size_t n = 0; n < N; ++n) {
    const Vec3& bn = model.scatterers[n].position;
    E[n] = eval_scattered_exterior(src_sol, bn).value;
    for (size_t m = 0; m < N; ++m) {
      K[n][m] = eval_scattered_exterior(unit[m], bn).value;
      if (m != n) {
        double d = (bn - model.scatterers[m].position).norm();
        K[n][m] += std::exp(I * k0 * d) / d;
      }
    }
  }

  auto residual = [&](const std::vector<Complex>& a) {
    double num = 0.0, den = 0.0;
    for (size_t n = 0; n < N; ++n) {
      Complex exc = E[n];
      for (size_t m = 0; m < N; ++m) exc += K[n][m] * a[m];
      Complex r = a[n] - model.scatterers[n].monopole_coefficient * exc;
      num += std::norm(r);
      den += std::norm(a[n]) + std::norm(model.scatterers[n].monopole_coefficient * E[n]);
    }
    return (den > 0.0) ? std::sqrt(num / den) : std::sqrt(num);
  };

  // damped fixed point, damping 0.5
  std::vector<double> history;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Complex> next(N);
    for (size_t n = 0; n < N; ++n) {
      Complex exc = E[n];
      for (size_t m = 0; m < N; ++m) exc += K[n][m] * A[m];
      next[n] = 0.5 * A[n] +
                0.5 * model.scatterers[n].monopole_coefficient * exc;
    }
    A = std::move(next);
    double res = residual(A);
    history.push_back(res);
    if (res < tol) return A;
  }

  // direct dense solve: (I - F K) A = F E
  std::vector<std::vector<Complex>> M(N, std::vector<Complex>(N));
  std::vector<Complex> rhs(N);
  for (size_t n = 0; n < N; ++n) {
    Complex f = model.scatterers[n].monopole_coefficient;
    for (size_t m = 0; m < N; ++m)
      M[n][m] = ((n == m) ? 1.0 : 0.0) - f * K[n][m];
    rhs[n] = f * E[n];
  }
  A = detail::solve_dense(M, rhs);
  double res = residual(A);
  history.push_back(res);
  if (res > tol * 1e3 && res > 1e-9) {
    std::string msg = "foldy_strengths: no convergence, residual history:";
    for (size_t i = history.size() > 6 ? history.size() - 6 : 0;
         i < history.size(); ++i)
      msg += " " + std::to_string(history[i]);
    throw std::runtime_error(msg);
  }
  return A;
}

}  // namespace cluscat
