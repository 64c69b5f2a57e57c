#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <vector>

#include "error.hpp"

namespace hmk::quad {

namespace gk {
// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK nodes)
inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk

template <class R>
struct Result {
  R value{};
  double error = 0.0;
  bool converged = true;
  int evals = 0;
};

template <class F>
using value_t = std::decay_t<std::invoke_result_t<F, double>>;

// error estimate follows QUADPACK: resasc * min(1, (200 |K - G| / resasc)^1.5)
template <class F>
Result<value_t<F>> gk15(F&& f, double a, double b) {
  using R = value_t<F>;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<R, 15> fv;
  fv[7] = f(c);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk::xk[static_cast<size_t>(i)];
    fv[static_cast<size_t>(i)] = f(c - dx);
    fv[static_cast<size_t>(14 - i)] = f(c + dx);
  }
  R kron = fv[7] * gk::wk[7];
  R gauss = fv[7] * gk::wg[3];
  for (int i = 0; i < 7; ++i) {
    const R s = fv[static_cast<size_t>(i)] + fv[static_cast<size_t>(14 - i)];
    kron += s * gk::wk[static_cast<size_t>(i)];
    if (i % 2 == 1) gauss += s * gk::wg[static_cast<size_t>(i / 2)];
  }
  const R mean = kron * 0.5;
  double asc = std::abs(fv[7] - mean) * gk::wk[7];
  for (int i = 0; i < 7; ++i)
    asc += gk::wk[static_cast<size_t>(i)] *
           (std::abs(fv[static_cast<size_t>(i)] - mean) + std::abs(fv[static_cast<size_t>(14 - i)] - mean));
  asc *= std::abs(h);
  double err = std::abs((kron - gauss) * h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  Result<R> r;
  r.value = kron * h;
  r.error = std::max(err, 50.0 * 2.2e-16 * std::abs(r.value));
  r.evals = 15;
  return r;
}

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 2000;
};

// global adaptive bisection of the worst interval; breakpoints split the range up front
template <class F>
Result<value_t<F>> adaptive(F&& f, double a, double b, const Options& opt = {},
                            std::vector<double> breaks = {}) {
  using R = value_t<F>;
  struct Piece {
    double a, b;
    R v;
    double e;
    bool operator<(const Piece& o) const { return e < o.e; }
  };
  Result<R> out;
  if (a == b) return out;
  double sgn = 1.0;
  if (b < a) {
    std::swap(a, b);
    sgn = -1.0;
  }
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b && x - pts.back() > 1e-15 * (std::abs(x) + 1)) pts.push_back(x);
  pts.push_back(b);

  std::priority_queue<Piece> heap;
  R total{};
  double err = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    auto r = gk15(f, pts[i], pts[i + 1]);
    out.evals += r.evals;
    heap.push({pts[i], pts[i + 1], r.value, r.error});
    total += r.value;
    err += r.error;
  }
  int n = static_cast<int>(heap.size());
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (n >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    Piece p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {  // interval exhausted at machine resolution
      out.converged = false;
      break;
    }
    heap.pop();
    auto l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
    out.evals += 30;
    total += l.value + r.value - p.v;
    err += l.error + r.error - p.e;
    heap.push({p.a, mid, l.value, l.error});
    heap.push({mid, p.b, r.value, r.error});
    ++n;
  }
  // resum to shed accumulated cancellation in the running totals
  R s{};
  double e = 0.0;
  while (!heap.empty()) {
    s += heap.top().v;
    e += heap.top().e;
    heap.pop();
  }
  out.value = sgn * s;
  out.error = e;
  return out;
}

// integral over [a, b] split into panels of the given width (oscillatory integrands);
// converged when the summed error estimate is below rel_tol times the summed panel magnitudes
template <class F>
Result<value_t<F>> panels(F&& f, double a, double b, double width, double rel_tol = 1e-11,
                          int max_per_panel = 64) {
  using R = value_t<F>;
  Result<R> out;
  if (!(b > a)) return out;
  const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / width)));
  const double h = (b - a) / static_cast<double>(n);
  Options o;
  o.abs_tol = 0.0;
  o.rel_tol = 1e-12;
  o.max_intervals = max_per_panel;
  R s{};
  double mag = 0.0, peak = 0.0;
  for (long i = 0; i < n; ++i) {
    const double lo = a + h * static_cast<double>(i), hi = (i + 1 == n) ? b : lo + h;
    auto r = gk15(f, lo, hi);
    peak = std::max(peak, std::abs(r.value));
    if (r.error > 1e-9 * std::abs(r.value) + 1e-14 * peak) r = adaptive(f, lo, hi, o);
    s += r.value;
    mag += std::abs(r.value);
    out.error += r.error;
    out.evals += r.evals;
  }
  out.value = s;
  out.converged = out.error <= rel_tol * std::max({std::abs(s), mag, 1e-300});
  return out;
}

// pole or branch point of an analytic integrand sitting just off the real axis
struct NearPole {
  double x;     // real part
  double side;  // +1 above the axis, -1 below
};

// int_a^b f(s) ds for f analytic in a strip, along a path lifted away from each near pole by a trapezoid
// on the opposite side of the axis; heights stay below half the gap to neighbouring poles and below cap
template <class F>
Result<std::complex<double>> contour(F&& f, double a, double b, std::vector<NearPole> poles, double cap,
                                     const Options& opt = {}) {
  using C = std::complex<double>;
  std::sort(poles.begin(), poles.end(), [](auto& p, auto& q) { return p.x < q.x; });
  std::vector<NearPole> in;
  for (auto& p : poles)
    if (p.x > a && p.x < b) in.push_back(p);
  std::vector<C> nodes{C(a, 0.0)};
  for (size_t i = 0; i < in.size(); ++i) {
    double h = cap;
    if (i > 0) h = std::min(h, 0.45 * (in[i].x - in[i - 1].x));
    if (i + 1 < in.size()) h = std::min(h, 0.45 * (in[i + 1].x - in[i].x));
    const double lo = std::max(a, in[i].x - h), hi = std::min(b, in[i].x + h), y = -in[i].side * h;
    if (lo > nodes.back().real()) nodes.push_back(C(lo, 0.0));
    nodes.push_back(C(lo, y));
    nodes.push_back(C(hi, y));
    nodes.push_back(C(hi, 0.0));
  }
  if (nodes.back() != C(b, 0.0)) nodes.push_back(C(b, 0.0));
  Result<C> out;
  Options o = opt;
  o.max_intervals = std::max(8, opt.max_intervals / static_cast<int>(nodes.size()));
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const C z0 = nodes[i], dz = nodes[i + 1] - nodes[i];
    if (std::abs(dz) == 0.0) continue;
    auto r = adaptive([&](double u) -> C { return f(z0 + u * dz) * dz; }, 0.0, 1.0, o);
    out.value += r.value;
    out.error += r.error;
    out.evals += r.evals;
    out.converged = out.converged && r.converged;
  }
  return out;
}

// Richardson extrapolation of values at eps, eps/2, eps/4, ... (error ~ eps^1, eps^2, ...)
template <class R>
R richardson(std::vector<R> v) {
  for (size_t level = 1; level < v.size(); ++level) {
    const double f = std::pow(2.0, static_cast<double>(level));
    for (size_t i = v.size() - 1; i >= level; --i) v[i] = (f * v[i] - v[i - 1]) / (f - 1.0);
  }
  return v.back();
}

// Gauss-Legendre nodes on [-1, 1] by Newton on P_n
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<size_t>(i)] = -z;
    x[static_cast<size_t>(n - 1 - i)] = z;
    w[static_cast<size_t>(i)] = w[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace hmk::quad
