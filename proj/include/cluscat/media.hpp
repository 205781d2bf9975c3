#pragma once

#include <cmath>
#include <stdexcept>

#include "cluscat/geom.hpp"

namespace cluscat {

/// Homogeneous acoustic medium, lossless when delta == 0.
struct Medium {
  double rho = 0.0;    // mass density [kg/m^3]
  double gamma = 0.0;  // mean compressibility [1/Pa]
  double delta = 0.0;  // compressional viscosity [Pa s]

  bool lossless() const { return delta == 0.0; }

  void validate() const {
    if (!(rho > 0.0)) throw std::domain_error("Medium: rho must be > 0");
    if (!(gamma > 0.0)) throw std::domain_error("Medium: gamma must be > 0");
    if (!(delta >= 0.0)) throw std::domain_error("Medium: delta must be >= 0");
  }
};

/// Medium parameters derived at a fixed angular frequency.
struct DerivedMedium {
  double rho = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double omega = 0.0;  // [rad/s]
  double nu = 0.0;     // omega * gamma * delta
  Complex beta{};      // effective density, rho for lossless media
  Complex k{};         // wavenumber, Im[k] >= 0
  double zeta = 0.0;   // specific admittance, sqrt(rho/gamma) for lossless media

  bool lossless() const { return delta == 0.0; }
};

/// Derives complex material parameters at angular frequency omega.
/// beta = rho (1 + i nu) / (1 + nu^2), k = omega sqrt(gamma beta) with the
/// branch Im[k] >= 0, zeta = 1 / Re[k / (omega beta)].
inline DerivedMedium derive(const Medium& m, double omega) {
  m.validate();
  if (!(omega > 0.0)) throw std::domain_error("derive: omega must be > 0");

  DerivedMedium dm;
  dm.rho = m.rho;
  dm.gamma = m.gamma;
  dm.delta = m.delta;
  dm.omega = omega;
  dm.nu = omega * m.gamma * m.delta;

  if (m.delta == 0.0) {
    dm.beta = m.rho;
    dm.k = omega * std::sqrt(m.gamma * m.rho);
    dm.zeta = std::sqrt(m.rho / m.gamma);
  } else {
    dm.beta = m.rho * (1.0 + I * dm.nu) / (1.0 + dm.nu * dm.nu);
    Complex k = omega * std::sqrt(m.gamma * dm.beta);
    if (k.imag() < 0.0) k = -k;
    dm.k = k;
    dm.zeta = 1.0 / std::real(dm.k / (omega * dm.beta));
  }
  return dm;
}

}  // namespace cluscat
