#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/hadamard_coeffs.hpp"

using namespace hmk;

static ModelConfig model(int d, double m_sq, double kappa) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

TEST_CASE("direct constants") {
  const auto v4 = direct_v_constants(model(4, 2.0, 0.0), 2);
  REQUIRE(v4.size() == 3);
  CHECK(v4[0] == doctest::Approx(-1.0));      // -m^2/2
  CHECK(v4[1] == doctest::Approx(0.5));       // m^4/8
  CHECK(v4[2] == doctest::Approx(-1.0 / 12)); // -m^6/96
  CHECK(direct_u_constants(model(4, 2.0, 0.0), 2) == std::vector<double>{1.0});
  const auto u3 = direct_u_constants(model(3, 1.0, 0.0), 2);
  REQUIRE(u3.size() == 3);
  CHECK(u3[1] == doctest::Approx(-1.0));
  CHECK(u3[2] == doctest::Approx(1.0 / 6));
  CHECK(direct_v_constants(model(3, 1.0, 0.0), 2).empty());
  CHECK(direct_v_constants(model(2, 1.0, 0.0), 1)[0] == 1.0);
}

TEST_CASE("constant ansatz solves the direct transport") {
  for (int d : {2, 3, 4}) {
    const auto dc = direct_coeffs(model(d, 1.0, 0.0), 2);
    CHECK(dc.ansatz_residual < 1e-10);
    for (const auto& f : dc.u) CHECK(f.provenance == Provenance::ConstantAnsatz);
    if (d != 3) CHECK(dc.v.size() == 3);
  }
  CHECK_THROWS_AS(direct_coeffs(model(4, 1.0, 0.0), 5), Error);
  CHECK_THROWS_AS(transport_constants(CoeffKind::V, 0, 3), Error);
}

TEST_CASE("ray-transported direct levels match the constants") {
  const auto cfg = model(4, 1.0, 0.0);
  const auto v = direct_transport_levels(cfg, CoeffKind::V, 1);
  for (double s : {-0.7, 0.0, 0.6}) {
    CHECK(v[0](s) == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(v[1](s) == doctest::Approx(0.125).epsilon(1e-8));
  }
}

TEST_CASE("4D massless reflected series") {
  for (double w : {0.5, 1.0, 3.0})
    for (double kappa : {0.3, 1.0, 4.0}) {
      const auto t = taylor_oracle_4d(w, kappa, 3);
      for (int j = 0; j <= 3; ++j) {
        const double b = bell_coeffs_4d_massless(j, w, kappa);
        CHECK(b == doctest::Approx(t[size_t(j)]).epsilon(1e-10).scale(1.0));
      }
      CHECK(kPrintedVPrimeSign * bell_coeffs_4d_massless(0, w, kappa) == doctest::Approx(-2 * kappa / w));
    }
  CHECK_THROWS_AS(bell_coeffs_4d_massless(1, 0.0, 1.0), Error);
}

TEST_CASE("transported reflected levels agree with the series") {
  ReflectedDomain dom;
  dom.z_prime = 0.5;
  dom.w_max = 3.0;
  dom.eta_half_width = 0.05;
  const auto cfg = model(4, 0.0, 1.0);
  const auto spec = make_parametrix(cfg, 2, dom, ReflectedSource::Transport);
  REQUIRE(spec.v_prime.size() == 3);
  for (double w : {0.6, 1.5, 2.8}) {
    const auto p = pair_reduced(4, 0.0, w, 0.5);
    for (const auto& f : spec.v_prime) {
      CHECK(f.provenance == Provenance::RayTransport);
      const double b = bell_coeffs_4d_massless(f.j, w, 1.0);
      CHECK(f(p) == doctest::Approx(b).epsilon(1e-6).scale(1.0));
    }
  }
  for (const auto& f : spec.v_prime) CHECK(verify_transport(f, nullptr, cfg, dom).residual < 1e-5);
  // off the transported slice the fields refuse to evaluate
  CHECK_THROWS_AS(spec.v_prime[0](pair_reduced(4, 0.0, 1.0, 0.7)), Error);
}

TEST_CASE("massive reflected transport") {
  ReflectedDomain dom;
  dom.z_prime = 0.5;
  dom.w_max = 2.0;
  dom.eta_half_width = 0.05;
  const auto cfg = model(4, 1.0, 1.0);
  const auto spec = make_parametrix(cfg, 1, dom);
  CHECK(spec.v_prime.size() == 2);
  for (const auto& f : spec.v_prime) CHECK(verify_transport(f, nullptr, cfg, dom).residual < 1e-5);
  // Dirichlet reflects the direct fields with a minus sign
  ModelConfig dir = cfg;
  dir.dirichlet = true;
  const auto ds = make_parametrix(dir, 1, dom);
  CHECK(ds.v_prime[0](pair_reduced(4, 0.0, 1.0, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("normalization against the vacuum") {
  for (int d : {2, 3, 4}) {
    auto spec = make_parametrix(model(d, 1.0, 0.0), 2, {}, ReflectedSource::Auto, false);
    const double derived = spec.alpha_derived;
    CHECK(calibrate_alpha(spec) == doctest::Approx(derived).epsilon(1e-6));
  }
  CHECK(parametrix_alpha(4) == doctest::Approx(-1.0 / (8 * std::numbers::pi * std::numbers::pi)));
}

TEST_CASE("local causal form carries the 4D delta coefficient") {
  const auto spec = make_parametrix(model(4, 0.0, 0.0), 0, {}, ReflectedSource::Auto, false);
  const auto lc = assemble_local_causal(spec, separation_from(4, 1.0, 0.5, 1.0, 1.0));
  REQUIRE(lc.deltas.size() == 1);
  CHECK(lc.deltas[0].order == 0);
  CHECK(lc.deltas[0].coeff == doctest::Approx(closed::causal_delta_coeffs(4, 0.0)[0]));
  const auto back = assemble_local_causal(spec, separation_from(4, -1.0, 0.5, 1.0, 1.0));
  CHECK(back.deltas[0].coeff == doctest::Approx(-lc.deltas[0].coeff));
}

TEST_CASE("coefficient names") {
  CHECK(parse_coeff_kind("vprime") == CoeffKind::VPrime);
  CHECK(parse_coeff_kind("uprime") == CoeffKind::UPrime);
  CHECK_THROWS_AS(parse_coeff_kind("w"), Error);
}
