#pragma once

#include <random>

#include "cluscat/cluster.hpp"

namespace testutil {

inline cluscat::Medium water() { return {1.0, 1.0, 0.0}; }

inline cluscat::Medium lossless_host() { return {1.4, 0.7, 0.0}; }

/// Lossy medium with loss parameter nu at the given frequency.
inline cluscat::Medium lossy_host(double nu, double omega, double rho = 1.2,
                                  double gamma = 1.0) {
  return {rho, gamma, nu / (omega * gamma)};
}

/// Host sphere of radius 1 about the origin with an interior source and
/// n point scatterers on a ring outside.
inline cluscat::ClusterModel base_model(const cluscat::Medium& host_medium,
                                        int n_scatterers, double omega = 1.0) {
  cluscat::ClusterModel m;
  m.host = {{0.0, 0.0, 0.0}, 1.0};
  m.host_medium = host_medium;
  m.exterior_medium = water();
  m.source = {{0.2, 0.0, 0.1}, {1.0, 0.0}};
  m.omega = omega;
  for (int i = 0; i < n_scatterers; ++i) {
    double phi = 2.0 * cluscat::PI * i / std::max(n_scatterers, 1) + 0.4;
    cluscat::PointScatterer sc;
    sc.position = {2.0 * std::cos(phi), 2.0 * std::sin(phi), 0.3 * i};
    sc.strength = {0.8 - 0.1 * i, 0.2 * i};
    m.scatterers.push_back(sc);
  }
  return m;
}

}  // namespace testutil
