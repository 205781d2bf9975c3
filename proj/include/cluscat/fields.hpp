#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cluscat/geom.hpp"
#include "cluscat/media.hpp"

namespace cluscat {

struct PointSource {
  Vec3 position;      // [m]
  Complex amplitude;  // [Pa m]
};

struct PointScatterer {
  Vec3 position;                       // [m], outside the host sphere
  Complex strength;                    // [Pa m]
  bool has_monopole = false;
  Complex monopole_coefficient{};      // [m], for the self-consistent mode
};

enum class Region { Exterior, Host, SourceRegion };

/// Field value and analytic gradient at one point.
struct FieldSample {
  Complex value{};  // [Pa]
  CVec3 gradient{}; // [Pa/m]
  Region region = Region::Exterior;
};

/// u = A exp(i k |r-a|) / |r-a| with its analytic gradient.
inline FieldSample spherical_wave(Complex A, const Vec3& a, Complex k,
                                  const Vec3& r, Region region) {
  Vec3 d = r - a;
  double R = d.norm();
  if (R == 0.0)
    throw std::domain_error("spherical_wave: evaluation at the source point");
  Complex u = A * std::exp(I * k * R) / R;
  // grad u = u (ik - 1/R) d/R
  CVec3 grad = (u * (I * k - 1.0 / R) / R) * d;
  return {u, grad, region};
}

inline FieldSample primary_field(const PointSource& src,
                                 const DerivedMedium& dm, const Vec3& r) {
  return spherical_wave(src.amplitude, src.position, dm.k, r,
                        Region::SourceRegion);
}

/// Complex acoustic intensity I = (i / (omega conj(beta))) u grad(conj u).
/// Re is the active part, Im the reactive part.
inline CVec3 intensity(const FieldSample& s, const DerivedMedium& dm) {
  Complex c = I / (dm.omega * std::conj(dm.beta));
  return c * s.value * s.gradient.conj();
}

/// Symmetrized cross intensity of a field pair,
/// (i / (omega conj(beta))) (u_k grad conj(u_m) + u_m grad conj(u_k)).
inline CVec3 intensity_cross(const FieldSample& a, const FieldSample& b,
                             const DerivedMedium& dm) {
  Complex c = I / (dm.omega * std::conj(dm.beta));
  return c * (a.value * b.gradient.conj() + b.value * a.gradient.conj());
}

/// Direct (self-term) and interaction (cross-term) intensities of a field
/// family; direct + interaction equals the intensity of the summed field.
inline void split_intensity(std::span<const FieldSample> samples,
                            const DerivedMedium& dm, CVec3& direct,
                            CVec3& interaction) {
  if (samples.empty())
    throw std::domain_error("split_intensity: empty sample family");
  FieldSample total;
  total.region = samples[0].region;
  direct = {};
  for (const auto& s : samples) {
    total.value += s.value;
    total.gradient += s.gradient;
    direct += intensity(s, dm);
  }
  interaction = intensity(total, dm) - direct;
}

/// Potential, kinetic and Lagrangian energy densities [J/m^3].
struct DensitySet {
  double potential = 0.0;
  double kinetic = 0.0;
  double lagrangian = 0.0;  // kinetic - potential
};

inline DensitySet densities(const FieldSample& s, const DerivedMedium& dm) {
  DensitySet d;
  d.potential = 0.5 * dm.gamma * std::norm(s.value);
  d.kinetic = dm.rho / (2.0 * dm.omega * dm.omega * std::norm(dm.beta)) *
              s.gradient.norm2();
  d.lagrangian = d.kinetic - d.potential;
  return d;
}

/// Symmetrized cross kinetic density of a field pair,
/// rho/(2 w^2 |beta|^2) (grad u_k . grad conj(u_m) + grad u_m . grad conj(u_k)).
inline double kinetic_cross(const FieldSample& a, const FieldSample& b,
                            const DerivedMedium& dm) {
  double c = dm.rho / (2.0 * dm.omega * dm.omega * std::norm(dm.beta));
  return c * 2.0 * std::real(a.gradient.cdot(b.gradient.conj()));
}

inline void split_densities(std::span<const FieldSample> samples,
                            const DerivedMedium& dm, DensitySet& direct,
                            DensitySet& interaction) {
  if (samples.empty())
    throw std::domain_error("split_densities: empty sample family");
  FieldSample total;
  DensitySet dsum;
  for (const auto& s : samples) {
    total.value += s.value;
    total.gradient += s.gradient;
    DensitySet d = densities(s, dm);
    dsum.potential += d.potential;
    dsum.kinetic += d.kinetic;
  }
  dsum.lagrangian = dsum.kinetic - dsum.potential;
  direct = dsum;
  DensitySet tot = densities(total, dm);
  interaction.potential = tot.potential - dsum.potential;
  interaction.kinetic = tot.kinetic - dsum.kinetic;
  interaction.lagrangian = interaction.kinetic - interaction.potential;
}

inline FieldSample sum_samples(std::span<const FieldSample> samples) {
  FieldSample total;
  if (!samples.empty()) total.region = samples[0].region;
  for (const auto& s : samples) {
    total.value += s.value;
    total.gradient += s.gradient;
  }
  return total;
}

}  // namespace cluscat
