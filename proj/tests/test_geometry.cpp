#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/geometry.hpp"

using namespace hmk;

TEST_CASE("world functions") {
  Point x(2.0, {0.5, -0.5}, 1.0), xp(0.5, {0.0, 0.5}, 0.25);
  const auto p = separation(x, xp);
  const double dt = 1.5, rho2 = 0.25 + 1.0, dz = 0.75, w = 1.25;
  CHECK(p.sigma == doctest::Approx(0.5 * (dt * dt - rho2 - dz * dz)));
  CHECK(p.sigma_minus == doctest::Approx(0.5 * (dt * dt - rho2 - w * w)));
  CHECK(p.tau_sq == doctest::Approx(dt * dt - rho2));
  CHECK(p.t_sum == 2.5);
  CHECK(synge(x, xp) == p.sigma);
  // sigma_- is sigma to the mirror image of x'
  CHECK(synge(x, reflect(xp)) == doctest::Approx(p.sigma_minus));
  CHECK(reflect(reflect(xp)).z == xp.z);
  CHECK(reflect(xp).image);
}

TEST_CASE("swapping arguments keeps both intervals") {
  const auto p = separation_from(4, 0.7, 0.3, 1.1, 0.4);
  const auto q = p.swapped();
  CHECK(q.dt == -p.dt);
  CHECK(q.z == p.z_prime);
  CHECK(q.rho() == doctest::Approx(p.rho()));
  CHECK(q.w() == p.w());
  CHECK(q.dz() == -p.dz());
}

TEST_CASE("regularized intervals") {
  const auto p = separation_from(3, -0.5, 0.2, 1.0, 0.5);
  const cplx a = regularized_interval(p, 1e-2, IntervalKind::Direct);
  CHECK(a.real() == doctest::Approx(p.sigma + 1e-4));
  CHECK(a.imag() == doctest::Approx(-0.5e-2));
  CHECK(regularized_interval(p, 1e-2, IntervalKind::Reflected).real() == doctest::Approx(p.sigma_minus + 1e-4));
  CHECK(regularized_interval(p, 1e-2, IntervalKind::Feynman).imag() == 1e-2);
  CHECK_THROWS_AS(regularized_interval(p, 0.0, IntervalKind::Direct), Error);
}

TEST_CASE("model validation") {
  ModelConfig c;
  c.m_sq = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.m_sq = 0.0;
  c.d = 2;
  CHECK_NOTHROW(c.validate());
  try {
    c.validate_state();
    FAIL("massless d=2 has no vacuum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infrared);
  }
}
