#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "error.hpp"

namespace hmk {

struct HalfIntOrder {
  int twice_order = 0;  // order = twice_order / 2
  double value() const { return 0.5 * twice_order; }
};

namespace detail {

inline double j_int_series(int n, double x) {
  // sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!)
  const double h = 0.5 * x, h2 = h * h;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= h / i;
  double sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > 30) break;
  }
  return sum;
}

// Hankel asymptotic expansion, x >= 12
inline double j_int_asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  const double ex = 8.0 * x;
  double p = 1.0, q = 0.0, term = 1.0, prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * ex);
    if (std::abs(term) > prev) break;  // asymptotic series started to diverge
    prev = std::abs(term);
    // k odd -> Q, k even -> P with alternating signs
    if (k % 2 == 1) q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    else p += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
    if (prev < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

// spherical Bessel j_n
inline double spherical_jn(int n, double x) {
  require(x >= 0.0 && n >= 0, ErrorCode::Domain, "spherical_jn needs x >= 0, n >= 0");
  if (x < 1e-3 * (n + 1)) {
    double df = 1.0;
    for (int k = 1; k <= n; ++k) df *= 2.0 * k + 1.0;
    const double x2 = x * x;
    return std::pow(x, n) / df * (1.0 - x2 / (2.0 * (2 * n + 3)) + x2 * x2 / (8.0 * (2 * n + 3) * (2 * n + 5)));
  }
  const double j0 = std::sin(x) / x;
  if (n == 0) return j0;
  if (x > n) {
    double a = j0, b = std::sin(x) / (x * x) - std::cos(x) / x;
    for (int k = 1; k < n; ++k) {
      const double c = (2.0 * k + 1.0) / x * b - a;
      a = b;
      b = c;
    }
    return b;
  }
  // Miller downward recurrence normalized by j_0
  const int top = n + 30 + static_cast<int>(x);
  double jp = 0.0, jc = 1e-300, out = 0.0;
  for (int k = top; k > 0; --k) {
    const double jm = (2.0 * k + 1.0) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 == n) out = jc;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      out *= 1e-250;
    }
  }
  return out * (j0 / jc);
}

// spherical Bessel y_n (upward recurrence is stable)
inline double spherical_yn(int n, double x) {
  require(x > 0.0 && n >= 0, ErrorCode::Domain, "spherical_yn needs x > 0, n >= 0");
  double a = -std::cos(x) / x;
  if (n == 0) return a;
  double b = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int k = 1; k < n; ++k) {
    const double c = (2.0 * k + 1.0) / x * b - a;
    a = b;
    b = c;
  }
  return b;
}

// J_n, integer n >= 0: series below x = 12, Hankel asymptotics above
inline double bessel_j_int(int n, double x) {
  require(n >= 0, ErrorCode::Domain, "negative integer order");
  if (x < 0.0) return (n % 2 ? -1.0 : 1.0) * bessel_j_int(n, -x);
  if (x < 12.0) return detail::j_int_series(n, x);
  if (n > 8 && x < 4.0 * n) {
    // large order: backward recurrence from an asymptotic-safe start
    double jp = 0.0, jc = 1e-300, out = 0.0;
    const int top = 2 * (n + static_cast<int>(x)) + 40;
    double norm = 0.0;
    for (int k = top; k > 0; --k) {
      const double jm = 2.0 * k / x * jc - jp;
      jp = jc;
      jc = jm;
      if (k - 1 == n) out = jc;
      if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
    }
    norm += jc;
    return out / norm;
  }
  return detail::j_int_asymptotic(n, x);
}

// J_alpha for alpha = twice_order/2 >= 0, x >= 0
inline double bessel_j(HalfIntOrder order, double x) {
  require(order.twice_order >= 0, ErrorCode::Domain, "negative order");
  require(x >= 0.0, ErrorCode::Domain, "bessel_j needs x >= 0");
  if (order.twice_order % 2 == 0) return bessel_j_int(order.twice_order / 2, x);
  const int n = (order.twice_order - 1) / 2;
  if (x == 0.0) return 0.0;
  return std::sqrt(2.0 * x / std::numbers::pi) * spherical_jn(n, x);
}

// J_{-(n+1/2)}(x) = (-1)^{n+1} sqrt(2x/pi) y_n(x)
inline double bessel_j_neg_half(int n, double x) {
  require(x > 0.0, ErrorCode::Domain, "negative half order needs x > 0");
  return ((n + 1) % 2 ? -1.0 : 1.0) * std::sqrt(2.0 * x / std::numbers::pi) * spherical_yn(n, x);
}

// modified Bessel K_0, K_1 of complex argument, |arg z| < pi
inline std::pair<std::complex<double>, std::complex<double>> bessel_k01(std::complex<double> z) {
  using C = std::complex<double>;
  require(std::abs(z) > 0.0, ErrorCode::Domain, "K at zero");
  constexpr double euler = 0.57721566490153286061;
  if (std::abs(z) <= 2.0 || z.real() < 0.0) {
    if (z.real() < 0.0 && std::abs(z) > 2.0) {
      // continuation across the imaginary axis: K_0(u e^{+-i pi}) = K_0(u) -+ i pi I_0(u)
      const C u = -z;
      auto [k0u, k1u] = bessel_k01(u);
      C i0{}, i1{}, t0 = 1.0, t1 = 0.5 * u;
      const C q = 0.25 * u * u;
      for (int k = 0; k < 300; ++k) {
        i0 += t0;
        i1 += t1;
        t0 *= q / (double(k + 1) * (k + 1));
        t1 *= q / (double(k + 1) * (k + 2));
        if (std::abs(t0) < 1e-17 * std::abs(i0) && k > 5) break;
      }
      const double s = z.imag() >= 0.0 ? 1.0 : -1.0;
      const C ipi(0.0, s * std::numbers::pi);
      // K_1(u e^{i s pi}) = -K_1(u) - i s pi I_1(u)
      return {k0u - ipi * i0, -k1u - ipi * i1};
    }
    const C q = 0.25 * z * z;
    const C lg = std::log(0.5 * z);
    C i0{}, i1{}, s0{}, s1{};
    C t = 1.0;         // q^k/(k!)^2
    double h = 0.0;    // harmonic number H_k
    for (int k = 0; k < 200; ++k) {
      const C t1 = t / double(k + 1);  // q^k/(k!(k+1)!)
      i0 += t;
      i1 += t1;
      s0 += t * h;
      // psi(k+1) + psi(k+2) = 2(H_k - gamma) + 1/(k+1)
      s1 += t1 * (2.0 * (h - euler) + 1.0 / (k + 1));
      h += 1.0 / (k + 1);
      t *= q / (double(k + 1) * (k + 1));
      if (std::abs(t) < 1e-18 * std::abs(i0) && k > 3) break;
    }
    i1 *= 0.5 * z;
    const C k0 = -(lg + euler) * i0 + s0;
    const C k1 = 1.0 / z + lg * i1 - 0.25 * z * s1;
    return {k0, k1};
  }
  if (std::abs(z) >= 18.0) {
    // Hankel asymptotic series; terms shrink until |k| ~ 2|z|, truncation error ~ e^{-2|z|}
    C s0 = 1.0, s1 = 1.0, t0 = 1.0, t1 = 1.0;
    for (int k = 1; k < 40; ++k) {
      const double o = (2.0 * k - 1) * (2.0 * k - 1);
      t0 *= -o / (8.0 * k) / z;
      t1 *= (4.0 - o) / (8.0 * k) / z;
      s0 += t0;
      s1 += t1;
      if (std::abs(t0) < 1e-17 && std::abs(t1) < 1e-17) break;
    }
    const C pre = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
    return {pre * s0, pre * s1};
  }
  // Steed/Temme continued fraction for K_0, K_1 (Re z >= 0, |z| > 2)
  C b = 2.0 * (1.0 + z), dd = 1.0 / b, hh = dd, delh = dd;
  C q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  C q = a1, c = a1, s = 1.0 + q * delh;
  double a = -a1;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / double(i);
    const C qn = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qn;
    q += c * qn;
    b += 2.0;
    dd = 1.0 / (b + a * dd);
    delh = (b * dd - 1.0) * delh;
    hh += delh;
    const C dels = q * delh;
    s += dels;
    if (std::abs(dels) < 1e-17 * std::abs(s)) break;
  }
  hh = a1 * hh;
  const C k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  const C k1 = k0 * (z + 0.5 - hh) / z;
  return {k0, k1};
}

// modified Bessel I_0 for real x; the series has positive terms, so no cancellation
inline double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double s = 0.0, t = 1.0;
  for (int k = 0; k < 1000; ++k) {
    s += t;
    t *= q / (double(k + 1) * (k + 1));
    if (t < 1e-17 * s) break;
  }
  return s;
}

// complete Bell polynomial B_q(x_1..x_q), recurrence B_{n+1} = sum_i C(n,i) B_{n-i} x_{i+1}
inline double complete_bell(int q, const std::vector<double>& args) {
  require(q >= 0 && static_cast<int>(args.size()) == q, ErrorCode::Domain,
          "complete_bell: argument count must equal q");
  std::vector<double> b(static_cast<size_t>(q + 1), 0.0);
  b[0] = 1.0;
  for (int n = 0; n < q; ++n) {
    double s = 0.0, binom = 1.0;
    for (int i = 0; i <= n; ++i) {
      s += binom * b[static_cast<size_t>(n - i)] * args[static_cast<size_t>(i)];
      binom = binom * (n - i) / (i + 1);
    }
    b[static_cast<size_t>(n + 1)] = s;
  }
  return b[static_cast<size_t>(q)];
}

inline double gen_binomial(double alpha, int m) {
  require(m >= 0, ErrorCode::Domain, "gen_binomial needs m >= 0");
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= (alpha - i) / (i + 1);
  return r;
}

inline double gamma_fn(double x) { return std::tgamma(x); }

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace hmk
