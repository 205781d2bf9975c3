#include <doctest.h>

#include "cluscat/cluster.hpp"
#include "cluscat/crosssec.hpp"
#include "helpers.hpp"

using namespace cluscat;

TEST_CASE("model validation") {
  ClusterModel m = testutil::base_model(testutil::lossless_host(), 1);
  CHECK_NOTHROW(m.validate());

  ClusterModel bad_src = m;
  bad_src.source.position = {3.0, 0.0, 0.0};
  CHECK_THROWS_AS(bad_src.validate(), std::domain_error);

  ClusterModel bad_sc = m;
  bad_sc.scatterers[0].position = {0.5, 0.0, 0.0};
  CHECK_THROWS_AS(bad_sc.validate(), std::domain_error);

  ClusterModel lossy_ext = m;
  lossy_ext.exterior_medium.delta = 0.1;
  CHECK_THROWS_AS(lossy_ext.validate(), std::domain_error);
}

TEST_CASE("attribution is complete at the host boundary") {
  ClusterModel m = testutil::base_model(testutil::lossless_host(), 2, 2.0);
  SphericalGrid grid = sphere_grid(32, 64);
  Assembly as = assemble(m, grid);
  CHECK(as.member_count() == 3);
  CHECK(as.host_index() == 2);

  DerivedMedium hdm = as.host_dm;
  Complex rho_rel = hdm.beta / as.ext_dm.rho;
  for (const Vec3& n : {Vec3{1, 0, 0}, Vec3{0, 0.6, 0.8}, Vec3{-0.48, 0.6, 0.64}}) {
    Vec3 r = m.host.center + m.host.radius * n;
    // exterior side includes the incident scatterer waves and all scattered
    // fields; host side is primary plus every secondary field
    FieldSample u0 = as.total_exterior_at(r);
    FieldSample uh = as.total_host_at(r);
    CHECK(std::abs(u0.value - uh.value) < 1e-9 * std::abs(uh.value));
    Complex du0 = u0.gradient.dot(n);
    Complex duh = uh.gradient.dot(n);
    CHECK(std::abs(rho_rel * du0 - duh) <
          1e-9 * std::max(std::abs(duh), 1.0));
  }
}

TEST_CASE("scatterer patterns are bare point-source patterns") {
  ClusterModel m = testutil::base_model(testutil::lossless_host(), 2, 2.0);
  SphericalGrid grid = sphere_grid(32, 64);
  Assembly as = assemble(m, grid);
  for (size_t j = 0; j < m.scatterers.size(); ++j)
    CHECK(scs(as.patterns[j]) ==
          doctest::Approx(4.0 * PI * std::norm(m.scatterers[j].strength))
              .epsilon(1e-12));
}

TEST_CASE("zero-strength scatterer contributes nothing") {
  ClusterModel m = testutil::base_model(testutil::lossless_host(), 2, 2.0);
  ClusterModel m0 = m;
  m0.scatterers[1].strength = 0.0;
  ClusterModel m1 = m;
  m1.scatterers.pop_back();

  SphericalGrid grid = sphere_grid(32, 64);
  Assembly a0 = assemble(m0, grid);
  Assembly a1 = assemble(m1, grid);
  CHECK(scs(a0.patterns[1]) < 1e-30);
  for (size_t q = 0; q < grid.nodes.size(); q += 37)
    CHECK(std::abs(a0.patterns[a0.host_index()].samples[q] -
                   a1.patterns[a1.host_index()].samples[q]) < 1e-12);
}

TEST_CASE("self-consistent strengths, matched host oracle") {
  // matched host is transparent, so the coupled system closes in free space
  ClusterModel m = testutil::base_model(testutil::water(), 2, 1.0);
  Complex f1{0.12, 0.05}, f2{-0.08, 0.1};
  m.scatterers[0].has_monopole = true;
  m.scatterers[0].monopole_coefficient = f1;
  m.scatterers[1].has_monopole = true;
  m.scatterers[1].monopole_coefficient = f2;

  auto A = foldy_strengths(m, FoldyMode::SelfConsistent, 1e-13);

  double k0 = derive(m.exterior_medium, m.omega).k.real();
  auto wave = [&](const Vec3& from, const Vec3& to) {
    double d = (to - from).norm();
    return std::exp(I * k0 * d) / d;
  };
  Complex E1 = m.source.amplitude * wave(m.source.position, m.scatterers[0].position);
  Complex E2 = m.source.amplitude * wave(m.source.position, m.scatterers[1].position);
  Complex G = wave(m.scatterers[0].position, m.scatterers[1].position);
  // A1 = f1 (E1 + G A2), A2 = f2 (E2 + G A1)
  Complex det = 1.0 - f1 * f2 * G * G;
  Complex A1 = (f1 * E1 + f1 * G * f2 * E2) / det;
  Complex A2 = (f2 * E2 + f2 * G * f1 * E1) / det;

  CHECK(std::abs(A[0] - A1) < 1e-10 * std::abs(A1));
  CHECK(std::abs(A[1] - A2) < 1e-10 * std::abs(A2));
}

TEST_CASE("fixed mode keeps strengths; missing monopole rejected") {
  ClusterModel m = testutil::base_model(testutil::lossless_host(), 2);
  auto A = foldy_strengths(m, FoldyMode::Fixed);
  CHECK(A.size() == 2);
  CHECK(A[0] == m.scatterers[0].strength);
  CHECK_THROWS_AS(foldy_strengths(m, FoldyMode::SelfConsistent),
                  std::domain_error);
}
