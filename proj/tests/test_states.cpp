#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hmk/states.hpp"

using namespace hmk;

static ModelConfig model(int d, double m_sq, double kappa) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

TEST_CASE("image-plus-smooth and mode sum agree") {
  for (auto cfg : {model(4, 1.0, 1.0), model(4, 0.0, 2.0), model(3, 1.0, 0.5), model(2, 1.0, 0.5), model(4, 1.0, 5.0)}) {
    const auto p = separation_from(cfg.d, 0.7, cfg.d > 2 ? 0.4 : 0.0, 0.9, 0.6);
    const cplx a = robin_two_point(cfg, p, 5e-2, StateMethod::ImagePlusSmooth);
    const cplx b = robin_two_point(cfg, p, 5e-2, StateMethod::ModeSum);
    CHECK(std::abs(a - b) < 1e-6 * std::abs(a));
  }
}

TEST_CASE("hermiticity") {
  const auto cfg = model(3, 1.0, 2.0);
  const auto p = separation_from(3, 1.2, 0.3, 0.4, 1.1);
  const cplx a = robin_two_point(cfg, p, 1e-2), b = robin_two_point(cfg, p.swapped(), 1e-2);
  CHECK(std::abs(a - std::conj(b)) < 1e-10 * std::abs(a));
}

TEST_CASE("field equation in x away from both cones") {
  // (d_t^2 - d_x^2 - d_y^2 - d_z^2 + m^2) omega(x, x') = 0 by fourth-order differences
  const auto cfg = model(4, 1.0, 1.0);
  const Point xp(0.0, {0.0, 0.0}, 0.8);
  const double h = 2e-2, eps = 5e-2;
  auto om = [&](double t, double x, double z) { return robin_two_point(cfg, separation(Point(t, {x, 0.0}, z), xp), eps); };
  auto d2 = [&](auto f) { return (-f(-2 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2 * h)) / (12 * h * h); };
  const double t0 = 0.2, x0 = 1.0, z0 = 0.9;
  const cplx c = om(t0, x0, z0);
  const cplx tt = d2([&](double s) { return om(t0 + s, x0, z0); });
  const cplx xx = d2([&](double s) { return om(t0, x0 + s, z0); });
  const cplx yy = d2([&](double s) { return robin_two_point(cfg, separation(Point(t0, {x0, s}, z0), xp), eps); });
  const cplx zz = d2([&](double s) { return om(t0, x0, z0 + s); });
  const cplx r = tt - xx - yy - zz + cfg.m_sq * c;
  CHECK(std::abs(r) < 1e-4 * (std::abs(tt) + std::abs(xx) + std::abs(zz)));
}

TEST_CASE("Robin condition at the wall") {
  const auto cfg = model(4, 1.0, 1.0);
  const Point xp(0.0, {0.0, 0.0}, 1.0);
  const auto a = check_bc(cfg, xp, 1e-2, 0.0, StateMethod::ImagePlusSmooth);
  const auto b = check_bc(cfg, xp, 5e-3, 0.0, StateMethod::ImagePlusSmooth);
  CHECK(a.residual < 1e-3);
  CHECK(b.residual < a.residual);
  ModelConfig dir = cfg;
  dir.dirichlet = true;
  CHECK(check_bc(dir, xp, 1e-2, 0.0, StateMethod::ImagePlusSmooth).residual < 1e-12);
}

TEST_CASE("large kappa approaches the Dirichlet state like 1/kappa") {
  const auto p = separation_from(4, 0.4, 0.2, 1.5, 1.2);
  ModelConfig dir = model(4, 0.0, 0.0);
  dir.dirichlet = true;
  const cplx ref = robin_two_point(dir, p, 1e-2);
  std::vector<double> ks, diffs;
  for (double k : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    ks.push_back(k);
    diffs.push_back(std::abs(robin_two_point(model(4, 0.0, k), p, 1e-2) - ref));
  }
  for (size_t i = 1; i < diffs.size(); ++i) CHECK(diffs[i] < diffs[i - 1]);
  CHECK(log_slope(ks, diffs) == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("commutator and Feynman kernel") {
  const auto cfg = model(4, 1.0, 1.0);
  std::vector<PairSeparation> pairs{separation_from(4, 2.0, 0.3, 0.6, 0.4), separation_from(4, -1.5, 0.2, 1.0, 1.1),
                                    separation_from(4, 0.4, 1.5, 0.7, 0.9)};
  const auto r = check_ccr(cfg, pairs, 1e-7);
  CHECK(r.pass);
  for (const auto& p : pairs) {
    const cplx a = feynman_kernel(cfg, p, 1e-7), b = feynman_kernel(cfg, p, 1e-7, FeynmanAssembly::TimeOrdered);
    CHECK(std::abs(a - b) < 1e-4 * std::abs(a));
    CHECK(std::abs(feynman_kernel(cfg, p.swapped(), 1e-7) - a) < 1e-4 * std::abs(a));
  }
  CHECK_THROWS_AS(check_ccr(cfg, {separation_from(4, 1.0, 0.0, 0.5, 0.5)}, 1e-3), Error);
}

TEST_CASE("smeared state is a positive quadratic form") {
  const auto cfg = model(4, 1.0, 2.0);
  GaussianTest f;
  f.center = Point(0.0, {0.0, 0.0}, 1.2);
  f.widths = {0.3, 0.3, 0.3, 0.25};
  const double one = smeared_state(cfg, f);
  CHECK(one > 0.0);
  f.amplitude = 2.0;
  CHECK(smeared_state(cfg, f) == doctest::Approx(4.0 * one).epsilon(1e-12));
  f.amplitude = 0.0;
  CHECK(smeared_state(cfg, f) == 0.0);
}

TEST_CASE("truncation is reported, not hidden") {
  StateOptions o;
  o.quad.k_max = 10.0;
  const auto p = separation_from(4, 0.7, 0.4, 0.9, 0.6);
  try {
    (void)robin_two_point(model(4, 1.0, 1.0), p, 1e-3, StateMethod::ModeSum, o);
    FAIL("expected NON_CONVERGENCE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
  }
}

TEST_CASE("states need a ground state") {
  const auto p = separation_from(3, 0.7, 0.4, 0.9, 0.6);
  try {
    (void)robin_two_point(model(3, 1.0, 1.0), p, 1e-2);
    FAIL("kappa = m in d = 3 has a zero mode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infrared);
  }
  CHECK_THROWS_AS(robin_two_point(model(4, 1.0, 1.0), separation_from(4, 0.5, 0.0, -0.2, 1.0), 1e-2), Error);
}
