#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "geometry.hpp"
#include "kernel_id.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace hmk {

struct QuadratureSpec {
  double k_max = 1e8;  // momentum cutoff; damping must reach machine zero below it
  int n_radial = 48;   // per-axis Gauss nodes for smeared momentum grids
  int n_depth = 48;    // Gauss nodes for depth profiles
  double rel_tol = 1e-8;

  void validate() const {
    require(k_max > 0.0, ErrorCode::Usage, "k_max must be > 0");
    require(n_radial >= 16 && n_depth >= 16, ErrorCode::Usage, "grid sizes must be >= 16");
    require(rel_tol > 0.0 && rel_tol <= 1e-2, ErrorCode::Usage, "rel_tol must lie in (0, 1e-2]");
  }
};

struct GaussianTest {
  Point center;
  std::vector<double> widths;  // t, x_perp..., z
  double amplitude = 1.0;

  double operator()(const Point& x) const {
    double e = 0.0;
    auto add = [&](double v, double c, double a) { e += (v - c) * (v - c) / (2 * a * a); };
    add(x.t, center.t, widths[0]);
    for (size_t i = 0; i < x.x_perp.size(); ++i) add(x.x_perp[i], center.x_perp[i], widths[i + 1]);
    add(x.z, center.z, widths.back());
    return amplitude * std::exp(-e);
  }

  // one-dimensional factor along axis a at coordinate v (amplitude not included)
  double axis(size_t a, double v) const {
    const double c = a == 0 ? center.t : (a + 1 == widths.size() ? center.z : center.x_perp[a - 1]);
    const double s = widths[a];
    return std::exp(-(v - c) * (v - c) / (2 * s * s));
  }

  // int exp(-(v-c)^2/(2s^2)) e^{i p v} dv
  cplx axis_ft(size_t a, double p) const {
    const double c = a == 0 ? center.t : (a + 1 == widths.size() ? center.z : center.x_perp[a - 1]);
    const double s = widths[a];
    return std::sqrt(2 * std::numbers::pi) * s * std::exp(-0.5 * p * p * s * s) * std::polar(1.0, p * c);
  }
};

namespace closed {

inline constexpr double pi = std::numbers::pi;

// x^{-n} J_n(x), finite at 0
inline double jn_over_pow(int n, double x) {
  if (x < 1e-8) return 1.0 / (std::pow(2.0, n) * factorial(n));
  return bessel_j_int(n, x) / std::pow(x, n);
}

// regular (Theta-supported) part of the whole-space commutator for sigma > 0, without sgn(dt)
inline double causal_regular(int d, double m, double sigma) {
  if (sigma <= 0.0) return 0.0;
  const double s = std::sqrt(2.0 * sigma);
  if (d % 2 == 0) {
    const int k = d / 2, n = k - 1;
    const double pre = 1.0 / (2.0 * std::pow(2 * pi, n));
    if (n == 0) return pre * bessel_j_int(0, m * s);
    if (m == 0.0) return 0.0;
    // d_sigma^n J0(m sqrt(2 sigma)) = (-m^2)^n x^{-n} J_n(x), x = m s
    return pre * std::pow(-m * m, n) * jn_over_pow(n, m * s);
  }
  const int k = (d - 1) / 2;
  const double pre = 1.0 / std::pow(2 * pi, k);
  if (m == 0.0) {
    double df = 1.0;  // (2k-3)!!
    for (int i = 2 * k - 3; i > 1; i -= 2) df *= i;
    return pre * ((k + 1) % 2 ? -1.0 : 1.0) * df / std::pow(s, 2 * k - 1);
  }
  const double z = m * s;
  return pre * (k % 2 ? -1.0 : 1.0) * std::pow(m, 2 * k - 1) * std::pow(z, 1 - k) * spherical_yn(k - 1, z);
}

// coefficients c_l of delta^{(l)}(sigma) in the whole-space commutator (even d >= 4), without sgn
inline std::vector<double> causal_delta_coeffs(int d, double m) {
  std::vector<double> c;
  if (d % 2 == 1 || d < 4) return c;
  const int n = d / 2 - 1;
  const double pre = 1.0 / (2.0 * std::pow(2 * pi, n));
  for (int l = 0; l <= n - 1; ++l) {
    const int i = n - 1 - l;  // F^{(i)}(0) = (-m^2/2)^i / i!
    c.push_back(pre * std::pow(-0.5 * m * m, i) / factorial(i));
  }
  return c;
}

// prefactor printed by the paper and its shape function (for calibration ratios)
inline double paper_prefactor(int d) {
  if (d % 2 == 0) {
    const int k = d / 2;
    return ((k - 1) % 2 ? -1.0 : 1.0) / std::pow(2 * pi, k);
  }
  const int k = (d - 1) / 2;
  return 1.0 / std::pow(2 * pi, k + 0.5);
}

// even d: d_sigma^{k-1} J0(m sqrt(2 sigma)); odd d: (m/s)^{k-1/2} J_{+(k-1/2)}(m s) as printed
inline double paper_shape(int d, double m, double sigma) {
  const double s = std::sqrt(2.0 * sigma);
  if (d % 2 == 0) {
    const int n = d / 2 - 1;
    if (n == 0) return bessel_j_int(0, m * s);
    return std::pow(-m * m, n) * jn_over_pow(n, m * s);
  }
  const int k = (d - 1) / 2;
  return std::pow(m / s, k - 0.5) * bessel_j({2 * k - 1}, m * s);
}

// shape with the corrected Bessel order -(k-1/2) for odd d
inline double derived_shape(int d, double m, double sigma) {
  if (d % 2 == 0) return paper_shape(d, m, sigma);
  const int k = (d - 1) / 2;
  const double s = std::sqrt(2.0 * sigma);
  return std::pow(m / s, k - 0.5) * bessel_j_neg_half(k - 1, m * s);
}

inline double derived_prefactor(int d) {
  if (d % 2 == 0) return 1.0 / (2.0 * std::pow(2 * pi, d / 2 - 1));
  const int k = (d - 1) / 2;
  return std::sqrt(pi / 2) / std::pow(2 * pi, k);
}

// vacuum two-point function of a field in `dim` spacetime dimensions with complex mass M,
// at complex time T = dt + i eps and spatial distance r: (2pi)^{-dim/2} (M/y)^{dim/2-1} K_{dim/2-1}(M y)
// as a function of y = sqrt(r^2 - T^2), principal branch; r^2 may be complex on deformed contours
inline cplx vacuum_y(int dim, cplx M, cplx T, cplx y) {
  switch (dim) {
    case 1: {
      require(std::abs(M) > 0.0, ErrorCode::Infrared, "massless oscillator has no ground state");
      return std::exp(cplx(0, 1) * M * T) / (2.0 * M);
    }
    case 2: {
      require(std::abs(M) > 0.0, ErrorCode::Infrared, "no vacuum for massless d=2");
      return bessel_k01(M * y).first / (2 * pi);
    }
    case 3: return std::exp(-M * y) / (4 * pi * y);
    case 4: {
      if (std::abs(M) == 0.0) return 1.0 / (4 * pi * pi * y * y);
      return M * bessel_k01(M * y).second / (4 * pi * pi * y);
    }
    default: throw Error(ErrorCode::Unsupported, "vacuum closed form implemented for dim <= 4");
  }
}

inline cplx vacuum(int dim, cplx M, cplx T, double r) { return vacuum_y(dim, M, T, std::sqrt(cplx(r * r, 0.0) - T * T)); }

}  // namespace closed

inline double sgn(double x) { return (x > 0) - (x < 0); }

// whole-space commutator off the light cone
inline double causal_closed(const ModelConfig& cfg, const PairSeparation& p, double eval_guard = 1e-8) {
  require(std::abs(p.sigma) > eval_guard, ErrorCode::OnCone, "causal_closed on the light cone");
  if (p.sigma < 0.0) return 0.0;
  return sgn(p.dt) * closed::causal_regular(cfg.d, cfg.mass(), p.sigma);
}

namespace modes {

// isotropic reduction of int d^n k/(2pi)^n e^{ik.x} g(|k|): returns the radial weight at k
inline double radial_weight(int n, double k, double r) {
  constexpr double pi = std::numbers::pi;
  switch (n) {
    case 1: return std::cos(k * r) / pi;
    case 2: return k * bessel_j_int(0, k * r) / (2 * pi);
    case 3: return r > 0.0 ? k * std::sin(k * r) / (2 * pi * pi * r) : k * k / (2 * pi * pi);
    default: throw Error(ErrorCode::Unsupported, "mode sums need d in {2,3,4}");
  }
}

template <class G>
auto radial_integral(int n, double r, double dt, double eps, double m, const QuadratureSpec& q, G&& g) {
  const double k_end = 40.0 / eps + m;
  require(k_end <= q.k_max, ErrorCode::NonConvergence,
          "damping does not reach machine zero below k_max; increase k_max or eps");
  const double width = 2 * std::numbers::pi / std::max(r + std::abs(dt), 1e-2);
  auto f = [&](double k) { return radial_weight(n, k, r) * g(k); };
  auto res = quad::panels(f, 0.0, k_end, width, q.rel_tol);
  require(res.converged, ErrorCode::NonConvergence, "mode-sum panel quadrature did not converge");
  return res.value;
}

}  // namespace modes

// commutator from the damped mode representation
inline double causal_modesum(const ModelConfig& cfg, const PairSeparation& p, double eps,
                             const QuadratureSpec& q = {}) {
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "causal_modesum needs d in {2,3,4}");
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  if (p.dt == 0.0) return 0.0;
  const double r = std::sqrt(p.rho() * p.rho() + p.dz() * p.dz()), m = cfg.mass();
  return modes::radial_integral(cfg.d - 1, r, p.dt, eps, m, q, [&](double k) {
    const double w = std::sqrt(k * k + cfg.m_sq);
    return w > 0.0 ? std::sin(w * p.dt) * std::exp(-eps * w) / w : p.dt;
  });
}

// Richardson-extrapolated mode sum (eps, eps/2, ..., levels values)
inline double causal_modesum_extrapolated(const ModelConfig& cfg, const PairSeparation& p, double eps,
                                          int levels = 2, const QuadratureSpec& q = {}) {
  std::vector<double> v;
  for (int i = 0; i < levels; ++i) v.push_back(causal_modesum(cfg, p, eps / std::pow(2.0, i), q));
  return quad::richardson(v);
}

enum class EvalMethod { Closed, ModeSum };

// Poincare vacuum, phase e^{+i w (dt + i eps)}/(2 w): antisymmetric part is +iG
inline cplx vacuum_two_point(const ModelConfig& cfg, const PairSeparation& p, double eps,
                             EvalMethod method = EvalMethod::Closed, const QuadratureSpec& q = {}) {
  cfg.validate_state();
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  const double r = std::sqrt(p.rho() * p.rho() + p.dz() * p.dz());
  if (method == EvalMethod::Closed) return closed::vacuum(cfg.d, cfg.mass(), cplx(p.dt, eps), r);
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "vacuum mode sum needs d in {2,3,4}");
  return modes::radial_integral(cfg.d - 1, r, p.dt, eps, cfg.mass(), q, [&](double k) {
    const double w = std::sqrt(k * k + cfg.m_sq);
    return std::exp(cplx(-eps * w, w * p.dt)) / (2.0 * w);
  });
}

// whole-space Feynman kernel G^- - i omega = -i [Theta(dt) omega(x,x') + Theta(-dt) omega(x',x)]
inline cplx feynman_whole(const ModelConfig& cfg, const PairSeparation& p, double eps) {
  const cplx w = vacuum_two_point(cfg, p, eps);
  return p.dt >= 0.0 ? cplx(0, -1) * w : cplx(0, -1) * std::conj(w);
}

namespace smear {

// momentum grid on [-K, K] per axis, K set by the narrowest Gaussian pair
struct Axis {
  std::vector<double> k, w;
};

inline Axis axis_grid(double width_a, double width_b, int n, double extent = 0.0) {
  const double s = std::min(width_a, width_b);
  const double K = 9.0 / s;  // exp(-K^2 s^2/2) = e^{-40.5}
  std::vector<double> x, w;
  quad::gauss_legendre(n, x, w);
  Axis a;
  // at least 4 panels, and at most one period of e^{i k extent} per panel
  const int panels = std::max(4, static_cast<int>(std::ceil(K * extent / std::numbers::pi)));
  const double h = 2 * K / panels;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double lo = -K + pnl * h, hi = lo + h;
    for (size_t i = 0; i < x.size(); ++i) {
      a.k.push_back(0.5 * (hi + lo) + 0.5 * (hi - lo) * x[i]);
      a.w.push_back(0.5 * (hi - lo) * w[i]);
    }
  }
  return a;
}

}  // namespace smear

// double smearing  int f(x) K(x,x') g(x') dx dx' for whole-space kernels, via Gaussian transforms
inline cplx smeared_eval(KernelId kernel, const GaussianTest& f, const GaussianTest& g, const ModelConfig& cfg,
                         const QuadratureSpec& q = {}) {
  require(kernel == KernelId::Causal || kernel == KernelId::Vacuum, ErrorCode::Unsupported,
          "smeared_eval supports causal and vacuum whole-space kernels");
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "smeared_eval needs d in {2,3,4}");
  if (kernel == KernelId::Vacuum) cfg.validate_state();
  const int n = cfg.d - 1;  // spatial axes 1..d-1 in GaussianTest layout
  std::vector<smear::Axis> ax;
  for (int a = 1; a <= n; ++a)
    ax.push_back(smear::axis_grid(f.widths[static_cast<size_t>(a)], g.widths[static_cast<size_t>(a)],
                                  q.n_radial / 4 + 4));
  // kernel(x,x') = int d^n k/(2pi)^n e^{ik(x-x')} phi(w, t-t'); the x-integrals give F(k) conj-type products
  cplx total = 0.0;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  const double norm = std::pow(2 * std::numbers::pi, -n);
  while (true) {
    double k2 = 0.0, wt = 1.0;
    cplx spatial = 1.0;
    for (int a = 0; a < n; ++a) {
      const double k = ax[static_cast<size_t>(a)].k[idx[static_cast<size_t>(a)]];
      k2 += k * k;
      wt *= ax[static_cast<size_t>(a)].w[idx[static_cast<size_t>(a)]];
      spatial *= f.axis_ft(static_cast<size_t>(a + 1), k) * g.axis_ft(static_cast<size_t>(a + 1), -k);
    }
    const double w = std::sqrt(k2 + cfg.m_sq);
    // time parts: int f(t) e^{i w t} dt and int g(t') e^{-i w t'} dt'
    const cplx ep = f.axis_ft(0, w) * g.axis_ft(0, -w);
    cplx phi;
    if (kernel == KernelId::Vacuum) {
      phi = ep / (2.0 * w);
    } else {
      const cplx em = f.axis_ft(0, -w) * g.axis_ft(0, w);
      phi = w > 0.0 ? (ep - em) / (cplx(0, 2) * w) : 0.0;
    }
    total += wt * spatial * phi;
    int a = 0;
    for (; a < n; ++a) {
      if (++idx[static_cast<size_t>(a)] < ax[static_cast<size_t>(a)].k.size()) break;
      idx[static_cast<size_t>(a)] = 0;
    }
    if (a == n) break;
  }
  return total * norm * f.amplitude * g.amplitude;
}

}  // namespace hmk
