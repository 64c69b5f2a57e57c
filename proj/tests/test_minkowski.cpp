#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/minkowski.hpp"

using namespace hmk;
using std::numbers::pi;

static ModelConfig model(int d, double m_sq) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  return c;
}

TEST_CASE("massless 4D vacuum") {
  const auto cfg = model(4, 0.0);
  for (double r : {0.3, 1.0, 2.0})
    for (double dt : {0.0, 0.1, -0.2}) {
      const auto p = separation_from(4, dt, r, 1.0, 1.0);
      const double eps = 1e-3;
      const cplx T(dt, eps);
      const cplx ref = 1.0 / (4 * pi * pi * (r * r - T * T));
      CHECK(std::abs(vacuum_two_point(cfg, p, eps) - ref) < 1e-12 * std::abs(ref));
    }
}

TEST_CASE("vacuum is hermitian and its antisymmetric part is iG") {
  for (int d : {2, 3, 4}) {
    const auto cfg = model(d, 1.0);
    const auto p = separation_from(d, 1.7, d > 2 ? 0.4 : 0.0, 1.3, 0.9);
    const double eps = 1e-6;
    const cplx w = vacuum_two_point(cfg, p, eps), ws = vacuum_two_point(cfg, p.swapped(), eps);
    CHECK(std::abs(ws - std::conj(w)) < 1e-12 * std::abs(w));
    CHECK((w - ws).imag() == doctest::Approx(causal_closed(cfg, p)).epsilon(1e-4));
    CHECK(std::abs((w - ws).real()) < 1e-12);
  }
}

TEST_CASE("closed commutator in low dimensions") {
  // d = 2: J0(m tau)/2; d = 3 massless: 1/(2 pi tau)
  auto p2 = separation_from(2, 2.0, 0.0, 1.5, 1.0);
  CHECK(causal_closed(model(2, 4.0), p2) == doctest::Approx(0.5 * bessel_j_int(0, 2.0 * std::sqrt(2 * p2.sigma))));
  auto p3 = separation_from(3, -1.5, 0.5, 1.0, 1.2);
  CHECK(causal_closed(model(3, 0.0), p3) == doctest::Approx(-1.0 / (2 * pi * std::sqrt(p3.tau_sq - 0.04))));
  CHECK(causal_closed(model(4, 1.0), separation_from(4, 0.2, 1.0, 1.0, 1.0)) == 0.0);
  CHECK_THROWS_AS(causal_closed(model(4, 0.0), separation_from(4, 1.0, 1.0, 1.0, 1.0)), Error);
}

TEST_CASE("delta coefficients on the 4D cone") {
  const auto c = closed::causal_delta_coeffs(4, 1.3);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == doctest::Approx(1 / (4 * pi)));
  CHECK(closed::causal_delta_coeffs(3, 1.0).empty());
}

TEST_CASE("mode sum reproduces the closed commutator") {
  for (int d : {2, 3, 4}) {
    const auto cfg = model(d, 1.0);
    const auto p = separation_from(d, 2.2, d > 2 ? 0.5 : 0.0, 1.0, 1.4);
    const double ref = causal_closed(cfg, p);
    CHECK(causal_modesum_extrapolated(cfg, p, 1e-3, 3) == doctest::Approx(ref).epsilon(1e-4));
    // spacelike: zero up to the eps floor
    CHECK(std::abs(causal_modesum(cfg, separation_from(d, 0.3, d > 2 ? 1.5 : 0.0, 1.0, 1.0 + (d > 2 ? 0 : 1.5)), 1e-3)) <
          1e-3);
  }
}

TEST_CASE("massless d=2 has no vacuum") {
  CHECK_THROWS_AS(vacuum_two_point(model(2, 0.0), separation_from(2, 0.5, 0, 1, 1), 1e-3), Error);
}

TEST_CASE("smeared vacuum is positive") {
  const auto cfg = model(4, 1.0);
  GaussianTest f;
  f.center = make_point(4, 0.0, 1.0);
  f.widths = {0.3, 0.3, 0.3, 0.3};
  const cplx v = smeared_eval(KernelId::Vacuum, f, f, cfg);
  CHECK(v.real() > 0.0);
  CHECK(std::abs(v.imag()) < 1e-10 * v.real());
  // the smeared commutator is antisymmetric: zero on the diagonal
  CHECK(std::abs(smeared_eval(KernelId::Causal, f, f, cfg)) < 1e-10 * v.real());
}
