#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/diagnostics.hpp"
#include "hmk/run_config.hpp"

using namespace hmk;

static ModelConfig model(int d, double m_sq, double kappa) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

TEST_CASE("vacuum exponents and log flags") {
  const auto m4 = fit_singularity_exponent(KernelId::Vacuum, Cone::Direct, model(4, 1.0, 0.0));
  CHECK(m4.exponent == doctest::Approx(1.0).epsilon(0.03));
  CHECK(m4.has_log);
  const auto z4 = fit_singularity_exponent(KernelId::Vacuum, Cone::Direct, model(4, 0.0, 0.0));
  CHECK(z4.exponent == doctest::Approx(1.0).epsilon(0.03));
  CHECK_FALSE(z4.has_log);
  const auto m3 = fit_singularity_exponent(KernelId::Vacuum, Cone::Direct, model(3, 1.0, 0.0));
  CHECK(m3.exponent == doctest::Approx(0.5).epsilon(0.03));
  CHECK_FALSE(m3.has_log);
  CHECK(expected_log(KernelId::RobinState, Cone::Reflected, model(4, 0.0, 1.0)));
  CHECK_FALSE(expected_log(KernelId::RobinState, Cone::Reflected, model(4, 0.0, 0.0)));
}

TEST_CASE("Robin state on the reflected cone") {
  const auto cfg = model(4, 0.0, 1.0);
  const auto f = fit_singularity_exponent(KernelId::RobinState, Cone::Reflected, cfg);
  CHECK(f.exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(f.has_log == expected_log(KernelId::RobinState, Cone::Reflected, cfg));
}

TEST_CASE("fits need dynamic range") {
  PathSpec p;
  p.s_hi = 10 * p.s_lo;
  CHECK_THROWS_AS(fit_singularity_exponent(KernelId::Vacuum, Cone::Direct, model(4, 1.0, 0.0), p), Error);
  CHECK_THROWS_AS(fit_singularity_exponent(KernelId::Vacuum, Cone::Reflected, model(4, 1.0, 0.0)), Error);
}

TEST_CASE("depth modes are complete only with the bound state") {
  const double with = robin_depth_recovery(1.0, ModeReflection::Derived, true, 1.0, 0.2, 1.0);
  const double without = robin_depth_recovery(1.0, ModeReflection::Derived, false, 1.0, 0.2, 1.0);
  CHECK(with == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(without - 1.0) > 1e-3);
}

TEST_CASE("equal-time data for the Robin propagator") {
  const auto r = equal_time_check(model(4, 1.0, 1.0), KernelId::RobinCausal);
  CHECK(r.value_residual < 1e-10);
  CHECK(r.delta_residual < 1e-3);
}

TEST_CASE("cell lists") {
  const auto c = parse_cells(" 4:0:1, 3:1:0.5 ,4:0:DIRICHLET");
  REQUIRE(c.size() == 3);
  CHECK(c[1].d == 3);
  CHECK(c[1].kappa == 0.5);
  CHECK(c[2].dirichlet);
  CHECK(c[2].label() == "d=4;m_sq=0;kappa=DIRICHLET");
  CHECK_THROWS_AS(parse_cells("4:0"), Error);
  CHECK_THROWS_AS(parse_cells(" , "), Error);
}

TEST_CASE("run configuration") {
  const auto rc = run_config_from(io::FlatConfig::parse("d = 3\nkappa = DIRICHLET\ncells = 4:1:1\nseed = 7\n"));
  CHECK(rc.model.d == 3);
  CHECK(rc.model.dirichlet);
  CHECK(rc.suite.grid.seed == 7);
  CHECK(rc.suite.cells.size() == 1);
  try {
    (void)run_config_from(io::FlatConfig::parse("kapa = 1\n"));
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }
  CHECK_THROWS_AS(run_config_from(io::FlatConfig::parse("j_max = 9\n")), Error);
  CHECK_THROWS_AS(run_config_from(io::FlatConfig::parse("correction_sign = *\n")), Error);
  // the printed default configuration reads back
  CHECK_NOTHROW(run_config_from(io::FlatConfig::parse(default_config_text())));
}

TEST_CASE("a one-cell suite passes and reruns byte for byte") {
  SuiteSettings st;
  st.cells = {{4, 1.0, 1.0}};
  st.n_support_pairs = 9;
  st.n_ccr_pairs = 4;
  st.n_positivity = 2;
  st.adjudicate = false;
  const auto a = run_verify_suite(st);
  CHECK(a.all_pass());
  int gated = 0;
  for (const auto& r : a.rows) gated += r.gated;
  CHECK(gated > 10);
  const auto b = run_verify_suite(st);
  CHECK(a.csv() == b.csv());
  CHECK(a.csv().rfind("check_id,cell,pair,eps,value,threshold,pass,gated,note\n", 0) == 0);
}

TEST_CASE("infrared cells are skipped, not failed") {
  SuiteSettings st;
  st.cells = {{2, 0.0, 1.0}};
  st.n_support_pairs = 6;
  st.n_ccr_pairs = 3;
  st.n_positivity = 1;
  st.adjudicate = false;
  const auto rep = run_verify_suite(st);
  CHECK(rep.all_pass());
  bool skipped = false;
  for (const auto& r : rep.rows) skipped = skipped || r.status == CheckStatus::Skipped;
  CHECK(skipped);
}
