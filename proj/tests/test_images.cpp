#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/images.hpp"
#include "hmk/robin_transform.hpp"

using namespace hmk;

static ModelConfig model(int d, double m_sq, double kappa = 0.0) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

TEST_CASE("image separation swaps the intervals") {
  const auto p = separation_from(4, 1.0, 0.2, 0.7, 0.4);
  const auto q = image_separation(p);
  CHECK(q.sigma == p.sigma_minus);
  CHECK(q.sigma_minus == p.sigma);
  CHECK(q.dz() == doctest::Approx(p.w()));
}

TEST_CASE("Dirichlet kernels vanish at the wall") {
  for (int d : {2, 3, 4}) {
    const auto cfg = model(d, 1.0);
    const auto p = separation_from(d, 2.0, d > 2 ? 0.3 : 0.0, 0.0, 0.8);
    CHECK(std::abs(image_eval(dirichlet(KernelId::Causal), cfg, p, 1e-3)) < 1e-14);
    CHECK(std::abs(image_eval(dirichlet(KernelId::Vacuum), cfg, p, 1e-3)) < 1e-14);
  }
}

TEST_CASE("Neumann kernels have zero normal derivative at the wall") {
  const auto cfg = model(4, 1.0);
  const double h = 1e-3;
  auto at = [&](double z) {
    return image_eval(neumann(KernelId::Vacuum), cfg, separation_from(4, 0.3, 0.5, z, 0.8), 1e-2);
  };
  const cplx one_sided = (-3.0 * at(0) + 4.0 * at(h) - at(2 * h)) / (2 * h);
  auto direct = [&](double z) { return whole_space_eval(KernelId::Vacuum, cfg, separation_from(4, 0.3, 0.5, z, 0.8), 1e-2); };
  const cplx no_image = (direct(h) - direct(0)) / h;
  CHECK(std::abs(one_sided) < 1e-4 * std::abs(no_image));
}

TEST_CASE("kappa = 0 Robin equals Neumann") {
  for (int d : {2, 3, 4}) {
    const auto cfg = model(d, 1.0, 0.0);
    const auto p = separation_from(d, 2.5, d > 2 ? 0.4 : 0.0, 1.0, 0.6);
    const double n = image_eval(neumann(KernelId::Causal), cfg, p, 1e-3).real();
    CHECK(robin_causal(cfg, p, 1e-3, RobinMethod::Convolution) == n);
    RobinOptions o;
    o.richardson_levels = 3;
    CHECK(robin_causal(cfg, p, 1e-3, RobinMethod::ModeSum, o) == doctest::Approx(n).epsilon(1e-4));
  }
}

TEST_CASE("image kernels reject negative depth") {
  CHECK_THROWS_AS(image_eval(neumann(KernelId::Causal), model(4, 1.0), separation_from(4, 1.0, 0.0, -0.1, 1.0), 1e-3),
                  Error);
}

TEST_CASE("equal-time data with images") {
  for (int sign : {-1, 1}) {
    const auto r = image_equal_time_check({KernelId::Causal, sign}, model(3, 1.0));
    CHECK(r.value_residual < 1e-8);
    CHECK(r.delta_residual < 1e-3);
    CHECK(r.image_contribution < 1e-8);
  }
  // close to the wall the mirror source adds sign * f(mirrored center) = sign * e^{-2}
  const auto near = image_equal_time_check(dirichlet(KernelId::Causal), model(4, 0.0), {}, 0.2, 0.2);
  CHECK(near.image_contribution == doctest::Approx(std::exp(-2.0)).epsilon(1e-3));
}
