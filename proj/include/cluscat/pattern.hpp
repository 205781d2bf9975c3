#pragma once

#include <vector>

#include "cluscat/geom.hpp"
#include "cluscat/quadrature.hpp"

namespace cluscat {

/// Far-field pattern g(r_hat) sampled on a spherical grid: u ~ g h_0(k0 r).
struct FarFieldPattern {
  const SphericalGrid* grid = nullptr;
  std::vector<Complex> samples;
  double k0 = 0.0;
};

/// Pattern of a bare point source A exp(i k0 |r-b|)/|r-b|:
/// g(r_hat) = i k0 A exp(-i k0 r_hat . b).
inline FarFieldPattern point_source_pattern(Complex A, const Vec3& b, double k0,
                                            const SphericalGrid& grid) {
  FarFieldPattern p;
  p.grid = &grid;
  p.k0 = k0;
  p.samples.resize(grid.nodes.size());
  for (size_t q = 0; q < grid.nodes.size(); ++q)
    p.samples[q] = I * k0 * A * std::exp(-I * k0 * grid.nodes[q].dot(b));
  return p;
}

inline FarFieldPattern sum_patterns(const std::vector<FarFieldPattern>& ps) {
  FarFieldPattern out;
  if (ps.empty()) return out;
  out.grid = ps[0].grid;
  out.k0 = ps[0].k0;
  out.samples.assign(ps[0].grid->nodes.size(), Complex{});
  for (const auto& p : ps) {
    if (p.grid != out.grid)
      throw std::domain_error("sum_patterns: grid mismatch");
    for (size_t q = 0; q < p.samples.size(); ++q) out.samples[q] += p.samples[q];
  }
  return out;
}

}  // namespace cluscat
