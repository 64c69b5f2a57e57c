#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmk/quadrature.hpp"
#include "hmk/specfun.hpp"

using namespace hmk;

TEST_CASE("integer-order Bessel J against tabulated values") {
  CHECK(bessel_j_int(0, 1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-14));
  CHECK(bessel_j_int(1, 2.5) == doctest::Approx(0.4970941024642741).epsilon(1e-14));
  CHECK(bessel_j_int(0, 20.0) == doctest::Approx(0.16702466434058316).epsilon(1e-12));
  CHECK(bessel_j_int(2, 30.0) == doctest::Approx(0.0784512460732653).epsilon(1e-12));
  CHECK(bessel_j_int(3, 0.0) == 0.0);
}

TEST_CASE("Bessel J from its integral representation") {
  // J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
  for (int n : {0, 1, 2, 5})
    for (double x : {0.3, 4.0, 11.5, 12.5, 40.0}) {
      auto r = quad::adaptive([&](double t) { return std::cos(n * t - x * std::sin(t)); }, 0.0, std::numbers::pi);
      CHECK(bessel_j_int(n, x) == doctest::Approx(r.value / std::numbers::pi).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("spherical Bessel functions in elementary form") {
  for (double x : {1e-4, 0.5, 3.0, 25.0}) {
    CHECK(spherical_jn(0, x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
    // the elementary j1 cancels near 0, compare against the series there
    const double j1 = x < 0.1 ? x / 3.0 - x * x * x / 30.0 : std::sin(x) / (x * x) - std::cos(x) / x;
    CHECK(spherical_jn(1, x) == doctest::Approx(j1).epsilon(1e-12));
    CHECK(spherical_yn(0, x) == doctest::Approx(-std::cos(x) / x).epsilon(1e-13));
  }
}

TEST_CASE("half-integer orders reduce to spherical functions") {
  const double x = 2.2;
  CHECK(bessel_j({1}, x) == doctest::Approx(std::sqrt(2 / (std::numbers::pi * x)) * std::sin(x)).epsilon(1e-13));
  CHECK(bessel_j_neg_half(0, x) == doctest::Approx(std::sqrt(2 / (std::numbers::pi * x)) * std::cos(x)).epsilon(1e-13));
}

TEST_CASE("modified Bessel K0, K1") {
  const auto [k0, k1] = bessel_k01({1.0, 0.0});
  CHECK(k0.real() == doctest::Approx(0.42102443824070834).epsilon(1e-13));
  CHECK(k1.real() == doctest::Approx(0.6019072301972346).epsilon(1e-13));
  // K_nu(z) = int_0^inf e^{-z cosh t} cosh(nu t) dt for Re z > 0
  for (std::complex<double> z : {std::complex<double>(0.3, 0.2), {2.5, -1.0}, {7.0, 3.0}, {0.05, 0.01}}) {
    const auto [a, b] = bessel_k01(z);
    auto i0 = quad::adaptive([&](double t) { return std::exp(-z * std::cosh(t)); }, 0.0, 12.0);
    auto i1 = quad::adaptive([&](double t) { return std::exp(-z * std::cosh(t)) * std::cosh(t); }, 0.0, 12.0);
    CHECK(std::abs(a - i0.value) < 1e-11 * std::abs(i0.value));
    CHECK(std::abs(b - i1.value) < 1e-11 * std::abs(i1.value));
  }
  CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-14));
}

TEST_CASE("complete Bell polynomials and binomials") {
  const std::vector<double> x{2.0, 3.0, 5.0};
  CHECK(complete_bell(0, {}) == 1.0);
  CHECK(complete_bell(2, {2.0, 3.0}) == 2.0 * 2.0 + 3.0);
  CHECK_THROWS_AS(complete_bell(2, x), Error);
  CHECK(complete_bell(3, x) == 8.0 + 3 * 2.0 * 3.0 + 5.0);
  CHECK(gen_binomial(0.5, 2) == doctest::Approx(-0.125));
  CHECK(gen_binomial(3.0, 2) == doctest::Approx(3.0));
  CHECK(factorial(5) == doctest::Approx(120.0));
}

TEST_CASE("quadrature") {
  auto r = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, {});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  // a pole just below the axis, integrated along a lifted path
  const double e = 1e-9;
  auto c = quad::contour([&](std::complex<double> s) { return 1.0 / (s - std::complex<double>(0.5, -e)); }, 0.0, 1.0,
                         {{0.5, -1.0}}, 0.2);
  CHECK(std::abs(c.value - std::log(std::complex<double>(0.5, e) / std::complex<double>(-0.5, e))) < 1e-10);
  CHECK(quad::richardson(std::vector<double>{1.1, 1.05, 1.025}) == doctest::Approx(1.0));
}
