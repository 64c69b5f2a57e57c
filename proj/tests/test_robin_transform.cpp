#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/robin_transform.hpp"

using namespace hmk;

static ModelConfig model(int d, double m_sq, double kappa) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

TEST_CASE("L_kappa and its transform") {
  CHECK(lkappa(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(lkappa(0.0, 3.0) == 1.0);
  CHECK(lkappa(-0.1, 1.0) == 0.0);
  for (double p : {-3.0, 0.0, 0.7, 12.0}) {
    const cplx n = lkappa_fourier_numeric(p, 1.5);
    CHECK(std::abs(n - lkappa_fourier(p, 1.5)) < 1e-11);
    // the other sign of kappa in the denominator is not the transform
    CHECK(std::abs(n - lkappa_fourier_printed(p, 1.5)) > 0.1 * std::abs(n));
  }
  CHECK_THROWS_AS(lkappa_fourier_numeric(1.0, 0.0), Error);
}

TEST_CASE("weak identity for L_kappa") {
  for (double kappa : {0.1, 1.0, 8.0})
    for (double c : {-0.5, 0.0, 1.0}) {
      const auto w = lkappa_weak_identity(kappa, c, 0.4);
      CHECK(w.residual < 1e-12);
    }
}

TEST_CASE("Robin-to-Dirichlet map inverts convolution with L") {
  // T (L * g) = g: take f = e^{-kappa z} int_0^z e^{kappa s} g(s) ds for g = cos
  const double kappa = 2.0, h = 1e-3;
  std::vector<double> f, g;
  for (int i = 0; i <= 2000; ++i) {
    const double z = i * h;
    const double c = kappa / (kappa * kappa + 1);
    f.push_back(c * std::cos(z) + std::sin(z) / (kappa * kappa + 1) - c * std::exp(-kappa * z));
    g.push_back(std::cos(z));
  }
  const auto t = robin_to_dirichlet(f, h, kappa);
  double err = 0.0;
  for (size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(t[i] - g[i]));
  CHECK(err < 1e-9);
  CHECK_THROWS_AS(robin_to_dirichlet({1, 2, 3}, h, kappa), Error);
}

TEST_CASE("mode reflection coefficient") {
  for (double k : {0.1, 1.0, 30.0})
    for (double kappa : {0.0, 0.5, 4.0}) {
      CHECK(std::abs(reflection_coefficient(ModeReflection::Derived, k, kappa)) == doctest::Approx(1.0));
      CHECK(std::abs(mode_bc_residual(ModeReflection::Derived, k, kappa)) < 1e-12 * (k + kappa));
      if (kappa > 0.0) CHECK(std::abs(mode_bc_residual(ModeReflection::Paper, k, kappa)) > 1e-3);
    }
}

TEST_CASE("closed 4D massless form agrees with the depth convolution") {
  const auto cfg = model(4, 0.0, 1.5);
  for (auto p : {separation_from(4, 2.5, 0.3, 0.4, 0.6), separation_from(4, -3.0, 1.0, 1.2, 0.1),
                 separation_from(4, 1.4, 0.2, 1.0, 0.8)}) {
    const double a = robin_causal(cfg, p, 1e-3, RobinMethod::Closed4dMassless);
    const double b = robin_causal(cfg, p, 1e-3, RobinMethod::Convolution);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
  CHECK_THROWS_AS(robin_causal(model(3, 0.0, 1.0), separation_from(3, 2.0, 0.0, 0.5, 0.5), 1e-3,
                               RobinMethod::Closed4dMassless),
                  Error);
}

TEST_CASE("convolution agrees with the mode sum") {
  for (auto cfg : {model(4, 1.0, 1.0), model(3, 1.0, 0.5), model(2, 1.0, 0.5), model(4, 1.0, 5.0)}) {
    const auto p = separation_from(cfg.d, 2.4, cfg.d > 2 ? 0.5 : 0.0, 0.7, 0.5);
    REQUIRE(p.sigma_minus > 0.0);
    const double conv = robin_causal(cfg, p, 1e-3, RobinMethod::Convolution);
    const double ms = robin_causal(cfg, p, 1e-3, RobinMethod::ModeSum);
    CHECK(ms == doctest::Approx(conv).epsilon(1e-4).scale(1e-3));
  }
}

TEST_CASE("retarded and advanced parts") {
  const auto cfg = model(4, 0.0, 1.0);
  const auto p = separation_from(4, 2.0, 0.3, 0.5, 0.5);
  const double g = robin_causal(cfg, p, 1e-3, RobinMethod::Convolution);
  CHECK(robin_retarded(cfg, p, 1e-3, RobinMethod::Convolution).value == g);
  CHECK(robin_advanced(cfg, p, 1e-3, RobinMethod::Convolution).value == 0.0);
  CHECK(robin_retarded(cfg, p.swapped(), 1e-3, RobinMethod::Convolution).value == 0.0);
  CHECK(robin_retarded(cfg, separation_from(4, 0.0, 0.3, 0.5, 0.5), 1e-3, RobinMethod::Convolution).boundary_of_support);
  CHECK_THROWS_AS(robin_causal(cfg, separation_from(4, 1.0, 0.0, 0.5, 0.5), 1e-3, RobinMethod::Convolution), Error);
}

TEST_CASE("support scan on a small grid") {
  GridSpec g;
  g.n_pairs = 30;
  const auto rep = support_scan(model(4, 1.0, 1.0), g, 4e-3);
  int total = 0;
  for (const auto& s : rep.strata) total += s.count;
  CHECK(total == 30);
  CHECK(rep.pass);
  CHECK(rep.spacelike_max < 10 * rep.floor);
  // the same seed gives the same pairs
  const auto a = stratified_pairs(4, g), b = stratified_pairs(4, g);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].dt == b[i].dt);
}

TEST_CASE("only one smoothing variant matches the mode sum") {
  const auto cfg = model(4, 0.0, 1.0);
  std::vector<PairSeparation> probes;
  for (double dt : {1.5, 2.0, -2.5, 3.0}) probes.push_back(separation_from(4, dt, 0.4, 0.6, 0.3));
  const auto a = adjudicate_smoothing(cfg, probes, 1e-3);
  CHECK(a.winner.dir == SmoothingDirection::PaperLemma);
  CHECK(a.winner.correction_sign == 1);
  CHECK(a.winner_mismatch < 1e-3);
  CHECK(a.runner_up_mismatch > 0.1);
}
