#include <doctest.h>

#include <random>

#include "cluscat/fields.hpp"

using namespace cluscat;

namespace {

FieldSample random_sample(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldSample s;
  s.value = {u(rng), u(rng)};
  s.gradient = {Complex{u(rng), u(rng)}, Complex{u(rng), u(rng)},
                Complex{u(rng), u(rng)}};
  s.region = Region::Host;
  return s;
}

}  // namespace

TEST_CASE("spherical wave gradient matches finite differences") {
  Complex A{0.7, -0.4};
  Vec3 a{0.1, 0.2, -0.3};
  Complex k{1.8, 0.25};
  Vec3 r{1.1, -0.7, 0.9};
  FieldSample s = spherical_wave(A, a, k, r, Region::Host);
  double h = 1e-6;
  auto val = [&](const Vec3& p) {
    return spherical_wave(A, a, k, p, Region::Host).value;
  };
  Complex gx = (val({r.x + h, r.y, r.z}) - val({r.x - h, r.y, r.z})) / (2 * h);
  Complex gy = (val({r.x, r.y + h, r.z}) - val({r.x, r.y - h, r.z})) / (2 * h);
  Complex gz = (val({r.x, r.y, r.z + h}) - val({r.x, r.y, r.z - h})) / (2 * h);
  CHECK(std::abs(s.gradient.x - gx) < 1e-7);
  CHECK(std::abs(s.gradient.y - gy) < 1e-7);
  CHECK(std::abs(s.gradient.z - gz) < 1e-7);
  CHECK_THROWS_AS(spherical_wave(A, a, k, a, Region::Host), std::domain_error);
}

TEST_CASE("intensity decomposition is exact") {
  std::mt19937 rng(7);
  DerivedMedium dm = derive(Medium{1.2, 0.9, 0.4}, 1.7);
  std::vector<FieldSample> fam;
  for (int i = 0; i < 4; ++i) fam.push_back(random_sample(rng));

  CVec3 direct, inter;
  split_intensity(fam, dm, direct, inter);
  CVec3 total = intensity(sum_samples(fam), dm);
  CVec3 sum = direct + inter;
  CHECK(std::abs(sum.x - total.x) < 1e-13);
  CHECK(std::abs(sum.y - total.y) < 1e-13);
  CHECK(std::abs(sum.z - total.z) < 1e-13);

  // interaction equals the sum of symmetrized pair terms
  CVec3 pairs;
  for (size_t i = 0; i < fam.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      pairs += intensity_cross(fam[i], fam[j], dm);
  CHECK(std::abs(pairs.x - inter.x) < 1e-13);
  CHECK(std::abs(pairs.y - inter.y) < 1e-13);
  CHECK(std::abs(pairs.z - inter.z) < 1e-13);
}

TEST_CASE("density decomposition is exact") {
  std::mt19937 rng(11);
  DerivedMedium dm = derive(Medium{1.1, 1.3, 0.2}, 2.2);
  std::vector<FieldSample> fam;
  for (int i = 0; i < 3; ++i) fam.push_back(random_sample(rng));

  DensitySet direct, inter;
  split_densities(fam, dm, direct, inter);
  DensitySet total = densities(sum_samples(fam), dm);
  CHECK(direct.potential + inter.potential ==
        doctest::Approx(total.potential).epsilon(1e-13));
  CHECK(direct.kinetic + inter.kinetic ==
        doctest::Approx(total.kinetic).epsilon(1e-13));
  CHECK(inter.lagrangian ==
        doctest::Approx(inter.kinetic - inter.potential).epsilon(1e-13));

  double kp = 0.0;
  for (size_t i = 0; i < fam.size(); ++i)
    for (size_t j = 0; j < i; ++j) kp += kinetic_cross(fam[i], fam[j], dm);
  CHECK(kp == doctest::Approx(inter.kinetic).epsilon(1e-12));
}

TEST_CASE("lossless point source radial active intensity") {
  DerivedMedium dm = derive(Medium{1.4, 0.7, 0.0}, 2.0);
  Complex A{0.9, 0.5};
  Vec3 a{0.0, 0.0, 0.0};
  Vec3 r{0.6, -0.2, 0.35};
  FieldSample s = spherical_wave(A, a, dm.k, r, Region::Host);
  CVec3 iv = intensity(s, dm);
  double radial = iv.real().dot(r.normalized());
  double expect = std::norm(A) / (r.norm2() * dm.zeta);
  CHECK(radial == doctest::Approx(expect).epsilon(1e-12));
}
