#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "hadamard_coeffs.hpp"
#include "images.hpp"
#include "minkowski.hpp"
#include "quadrature.hpp"
#include "robin_transform.hpp"
#include "specfun.hpp"

namespace hmk {

enum class StateMethod { ModeSum, ImagePlusSmooth };

inline const char* to_string(StateMethod m) { return m == StateMethod::ModeSum ? "modesum" : "image_plus_smooth"; }

inline StateMethod parse_state_method(const std::string& s) {
  if (s == "modesum") return StateMethod::ModeSum;
  if (s == "image_plus_smooth") return StateMethod::ImagePlusSmooth;
  throw Error(ErrorCode::Usage, "unknown state method '" + s + "'");
}

struct StateOptions {
  ModeReflection reflection = ModeReflection::Derived;
  bool include_bound_state = true;
  QuadratureSpec quad{};
};

namespace detail {

inline void require_state(const ModelConfig& cfg, const PairSeparation& p, double eps) {
  cfg.validate_state();
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  require(p.z >= 0.0 && p.z_prime >= 0.0, ErrorCode::Domain, "states need z, z' >= 0");
}

// Bound sector of the (d-1)-dimensional boundary-parallel theory with mass^2 m^2 - kappa^2, without 2 kappa e^{-kappa w}.
// Stable modes carry the vacuum phase; the growing band |k| < K_c sits in the symmetric Gaussian state
// [cosh(l (t + t')) + i sinh(l dt)]/(2 l), l = sqrt(K_c^2 - k^2).
inline cplx bound_sector(const ModelConfig& cfg, double dt, double t_sum, double eps, double rho) {
  const int dim = cfg.d - 1;
  const double mb2 = cfg.m_sq - cfg.kappa * cfg.kappa;
  const cplx T(dt, eps);
  if (mb2 > 0.0) return closed::vacuum(dim, std::sqrt(mb2), T, rho);
  require(!(mb2 == 0.0 && dim <= 2), ErrorCode::Infrared, "kappa = m leaves a zero mode without ground state");
  if (mb2 == 0.0) return closed::vacuum(dim, 0.0, T, rho);
  const double K = std::sqrt(-mb2);
  if (dim == 1) return cplx(std::cosh(K * t_sum), std::sinh(K * dt)) / (2 * K);
  // continuation of the vacuum to mass i K counts the band with e^{-l T}/(2 i l); swap it for the band state
  const cplx cont = closed::vacuum(dim, cplx(0.0, K), T, rho);
  auto band = [&](double th) {
    const double k = K * std::sin(th), l = K * std::cos(th);
    const cplx g = -std::exp(-l * T) / cplx(0.0, 2.0) + cplx(std::cosh(l * t_sum), std::sinh(l * dt)) / 2.0;
    if (dim == 2) return std::cos(k * rho) * g / std::numbers::pi;
    return k * bessel_j_int(0, k * rho) * g / (2 * std::numbers::pi);
  };
  // spacelike separations cancel the band almost completely; the floor follows the integrand size
  quad::Options o;
  o.abs_tol = 1e-14 * K * K * std::cosh(K * t_sum);
  o.rel_tol = 1e-12;
  auto r = quad::adaptive(band, 0.0, 0.5 * std::numbers::pi, o);
  require(r.converged, ErrorCode::NonConvergence, "growing-band quadrature did not converge");
  return cont + r.value;
}

}  // namespace detail

namespace detail {

// W_d at complex depth offset u: the integrand continues analytically off the real axis
inline cplx vacuum_at_depth(int d, double m, cplx T, double rho, cplx u) {
  return closed::vacuum_y(d, m, T, std::sqrt(rho * rho + u * u - T * T));
}

inline quad::Options smoothing_tolerance(cplx scale) {
  quad::Options o;
  o.abs_tol = 1e-13 * std::max(1.0, std::abs(scale));
  o.rel_tol = 1e-11;
  o.max_intervals = 8000;
  return o;
}

}  // namespace detail

// omega_N - 2 kappa int_0^inf e^{-kappa s} W_d(T, sqrt(rho^2 + (w - s)^2)) ds + 2 kappa e^{-kappa w} (bound sector)
// The light-cone poles at s = w -+ tau sit eps dt/tau off the axis; the path is lifted around them.
inline cplx robin_state_image_smooth(const ModelConfig& cfg, const PairSeparation& p, double eps,
                                     const StateOptions& opt = {}) {
  detail::require_state(cfg, p, eps);
  const int d = cfg.d;
  const double m = cfg.mass(), rho = p.rho(), w = p.w(), kappa = cfg.kappa;
  const cplx T(p.dt, eps);
  auto W = [&](cplx u) { return detail::vacuum_at_depth(d, m, T, rho, u); };
  if (cfg.dirichlet) return W(p.dz()) - W(w);
  cplx out = W(p.dz()) + W(w);
  if (kappa == 0.0) return out;
  const double tau = p.tau_sq > 0.0 ? std::sqrt(p.tau_sq) : 0.0;
  std::vector<quad::NearPole> poles;
  if (tau > 0.0 && p.dt != 0.0) poles = {{w - tau, -sgn(p.dt)}, {w + tau, sgn(p.dt)}};
  auto r = quad::contour([&](cplx s) { return std::exp(-kappa * s) * W(w - s); }, 0.0, w + tau + 50.0 / kappa, poles,
                         0.5 * tau, detail::smoothing_tolerance(out));
  require(r.converged, ErrorCode::NonConvergence, "depth smoothing of the reflected vacuum did not converge");
  out -= 2 * kappa * r.value;
  if (opt.include_bound_state) out += 2 * kappa * std::exp(-kappa * w) * detail::bound_sector(cfg, p.dt, p.t_sum, eps, rho);
  return out;
}

// kappa < m only: omega_N + 2 kappa int_0^inf e^{+kappa s} W_d(w + s) ds (continuum and bound state in one integral)
inline cplx robin_state_growing_form(const ModelConfig& cfg, const PairSeparation& p, double eps) {
  detail::require_state(cfg, p, eps);
  require(cfg.kappa < cfg.mass(), ErrorCode::Domain, "growing smoothing converges only for kappa < m");
  const double m = cfg.mass(), rho = p.rho(), w = p.w(), kappa = cfg.kappa;
  const cplx T(p.dt, eps);
  auto W = [&](cplx u) { return detail::vacuum_at_depth(cfg.d, m, T, rho, u); };
  cplx out = W(p.dz()) + W(w);
  if (kappa == 0.0) return out;
  const double tau = p.tau_sq > 0.0 ? std::sqrt(p.tau_sq) : 0.0;
  std::vector<quad::NearPole> poles;
  if (tau > 0.0 && p.dt != 0.0) poles = {{tau - w, sgn(p.dt)}};
  auto r = quad::contour([&](cplx s) { return std::exp(kappa * s) * W(w + s); }, 0.0, tau + 60.0 / (m - kappa), poles,
                         0.5 * tau, detail::smoothing_tolerance(out));
  require(r.converged, ErrorCode::NonConvergence, "growing smoothing did not converge");
  return out + 2 * kappa * r.value;
}

// (1/pi) int_0^inf [cos(k dz) - Re(R e^{ikw})] W_{d-1}(T, rho; sqrt(k^2 + m^2)) dk + bound sector
inline cplx robin_state_modesum(const ModelConfig& cfg, const PairSeparation& p, double eps,
                                const StateOptions& opt = {}) {
  detail::require_state(cfg, p, eps);
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "state mode sum needs d in {2,3,4}");
  const int dim = cfg.d - 1;
  const double rho = p.rho(), w = p.w(), dz = p.dz(), kappa = cfg.kappa, m = cfg.mass();
  const cplx T(p.dt, eps);
  auto [decay, freq] = lowdim::envelope(dim, p.dt, eps, rho);
  const double k_end = m + 40.0 / decay;
  require(k_end <= opt.quad.k_max, ErrorCode::NonConvergence, "mode sum cutoff exceeds k_max");
  const double width = 2 * std::numbers::pi / std::max(w + freq, 1e-2);
  auto f = [&](double k) {
    const cplx R = cfg.dirichlet ? cplx(1.0) : reflection_coefficient(opt.reflection, k, kappa);
    const double psi = std::cos(k * dz) - (R * std::polar(1.0, k * w)).real();
    const double mu = std::sqrt(k * k + cfg.m_sq);
    if (dim == 2 && mu == 0.0) return cplx(0.0);  // integrable log endpoint
    return psi * closed::vacuum(dim, mu, T, rho) / std::numbers::pi;
  };
  auto r = quad::panels(f, 0.0, k_end, width, opt.quad.rel_tol);
  require(r.converged, ErrorCode::NonConvergence, "state mode sum did not converge");
  cplx out = r.value;
  if (!cfg.dirichlet && kappa > 0.0 && opt.include_bound_state && opt.reflection == ModeReflection::Derived)
    out += 2 * kappa * std::exp(-kappa * w) * detail::bound_sector(cfg, p.dt, p.t_sum, eps, rho);
  return out;
}

inline cplx robin_two_point(const ModelConfig& cfg, const PairSeparation& p, double eps,
                            StateMethod method = StateMethod::ImagePlusSmooth, const StateOptions& opt = {}) {
  return method == StateMethod::ModeSum ? robin_state_modesum(cfg, p, eps, opt)
                                        : robin_state_image_smooth(cfg, p, eps, opt);
}

// ---- boundary condition

struct BcProbe {
  double dt, rho;
  cplx value, derivative, residual;
};

struct BcReport {
  double eps = 0.0, h = 0.0;
  double residual = 0.0;  // max |(d_z + kappa) omega| / scale
  double scale = 0.0;
  std::vector<BcProbe> probes;
};

// probes at z = 0 with sigma = sigma_- kept away from the cone for z' = 1
inline std::vector<std::pair<double, double>> bc_probe_set(int d) {
  std::vector<std::pair<double, double>> out;
  for (double dt : {0.3, -0.6, 1.6, -2.0}) {
    out.push_back({dt, 0.0});
    if (d > 2) out.push_back({dt, 0.5});
  }
  return out;
}

inline BcReport check_bc(const ModelConfig& cfg, const Point& x_prime, double eps, double h = 0.0,
                         StateMethod method = StateMethod::ModeSum, const StateOptions& opt = {}) {
  require(x_prime.z > 0.0, ErrorCode::Domain, "check_bc needs an interior x'");
  if (h <= 0.0) h = std::sqrt(eps) / 10;
  BcReport rep;
  rep.eps = eps;
  rep.h = h;
  const int d = cfg.d;
  double worst = 0.0;
  for (auto [dt, rho] : bc_probe_set(d)) {
    auto at = [&](double z) {
      Point x = make_point(d, x_prime.t + dt, z);
      for (size_t i = 0; i < x.x_perp.size(); ++i) x.x_perp[i] = x_prime.x_perp[i];
      if (d > 2) x.x_perp[0] += rho;
      return robin_two_point(cfg, separation(x, x_prime), eps, method, opt);
    };
    const cplx f0 = at(0.0), f1 = at(h), f2 = at(2 * h), f3 = at(3 * h);
    const cplx der = (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6 * h);
    const cplx res = cfg.dirichlet ? f0 : der + cfg.kappa * f0;
    const double k_eff = cfg.dirichlet ? 0.0 : cfg.kappa;
    rep.scale = std::max(rep.scale, std::abs(der) + (k_eff + 1.0 / x_prime.z) * std::abs(f0));
    worst = std::max(worst, std::abs(res));
    rep.probes.push_back({dt, rho, f0, der, res});
  }
  rep.residual = worst / std::max(rep.scale, 1e-300);
  return rep;
}

// ---- CCR and Feynman kernel

struct CcrRow {
  PairSeparation pair;
  cplx antisym;
  double causal;
  double residual;
};

struct CcrReport {
  double eps = 0.0;
  double residual = 0.0;  // max |omega(x,x') - omega(x',x) - i G|
  double scale = 0.0;     // max |omega|
  bool pass = false;
  std::vector<CcrRow> rows;
};

// G_kappa at the same pair from the convolution path (ε-independent off the cones)
inline double robin_causal_reference(const ModelConfig& cfg, const PairSeparation& p, double eps) {
  if (cfg.d == 4 && cfg.m_sq == 0.0 && !cfg.dirichlet) return robin_causal(cfg, p, eps, RobinMethod::Closed4dMassless);
  return robin_causal(cfg, p, eps, RobinMethod::Convolution);
}

inline CcrReport check_ccr(const ModelConfig& cfg, const std::vector<PairSeparation>& pairs, double eps,
                           StateMethod method = StateMethod::ImagePlusSmooth, const StateOptions& opt = {},
                           double threshold = 1e-4) {
  CcrReport rep;
  rep.eps = eps;
  for (const auto& p : pairs) {
    require(std::abs(p.sigma) > 10 * eps && std::abs(p.sigma_minus) > 10 * eps, ErrorCode::Domain,
            "CCR pairs must avoid both cones by 10 eps");
    const cplx a = robin_two_point(cfg, p, eps, method, opt), b = robin_two_point(cfg, p.swapped(), eps, method, opt);
    const double G = robin_causal_reference(cfg, p, eps);
    const double r = std::abs(a - b - cplx(0.0, G));
    rep.residual = std::max(rep.residual, r);
    rep.scale = std::max(rep.scale, std::abs(a));
    rep.rows.push_back({p, a - b, G, r});
  }
  rep.pass = rep.residual <= threshold * rep.scale;
  return rep;
}

enum class FeynmanAssembly { Primary, TimeOrdered };

// primary: G^- - i omega with G^- = -Theta(-dt) G_kappa; time-ordered: -i[Theta(dt) omega(x,x') + Theta(-dt) omega(x',x)]
inline cplx feynman_kernel(const ModelConfig& cfg, const PairSeparation& p, double eps,
                           FeynmanAssembly how = FeynmanAssembly::Primary,
                           StateMethod method = StateMethod::ImagePlusSmooth, const StateOptions& opt = {}) {
  const cplx mi(0.0, -1.0);
  if (how == FeynmanAssembly::TimeOrdered) {
    require(p.dt != 0.0, ErrorCode::Domain, "time-ordered assembly needs dt != 0");
    return mi * (p.dt > 0.0 ? robin_two_point(cfg, p, eps, method, opt)
                            : robin_two_point(cfg, p.swapped(), eps, method, opt));
  }
  const double gminus = p.dt < 0.0 ? -robin_causal_reference(cfg, p, eps) : 0.0;
  return gminus + mi * robin_two_point(cfg, p, eps, method, opt);
}

// ---- positivity by the mode representation: omega(conj f, f) = sum over modes |A|^2/(2 w)

struct PositivityRow {
  double value = 0.0;
  bool interior = true;  // gated only when the Gaussian clears the boundary by three widths
};

struct PositivityReport {
  double min_interior = 0.0, scale = 0.0, min_stress = 0.0;
  bool pass = false;
  std::vector<PositivityRow> rows;
};

inline double smeared_state(const ModelConfig& cfg, const GaussianTest& f, const StateOptions& opt = {}) {
  cfg.validate_state();
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "smeared state needs d in {2,3,4}");
  require(f.center.z >= 0.0, ErrorCode::Domain, "Gaussian centre must lie in z >= 0");
  const int d = cfg.d, np = d - 2;
  const double kappa = cfg.dirichlet ? 0.0 : cfg.kappa;
  const auto& q = opt.quad;
  const double sz = f.widths.back(), cz = f.center.z, st = f.widths[0], ct = f.center.t;

  // depth profile nodes on z >= 0
  std::vector<double> gx, gw, zn, zw;
  quad::gauss_legendre(q.n_depth, gx, gw);
  const double zlo = std::max(0.0, cz - 9 * sz), zhi = cz + 9 * sz;
  const int zp = 8;
  for (int pn = 0; pn < zp; ++pn) {
    const double lo = zlo + (zhi - zlo) * pn / zp, hi = zlo + (zhi - zlo) * (pn + 1) / zp;
    for (size_t i = 0; i < gx.size(); ++i) {
      const double z = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i];
      zn.push_back(z);
      zw.push_back(0.5 * (hi - lo) * gw[i] * f.axis(static_cast<size_t>(np + 1), z));
    }
  }
  auto depth = [&](double k) {  // int g_z(z) Psi_k(z) dz
    const cplx R = cfg.dirichlet ? cplx(1.0) : reflection_coefficient(opt.reflection, k, kappa);
    cplx s = 0.0;
    for (size_t i = 0; i < zn.size(); ++i) s += zw[i] * (std::polar(1.0, -k * zn[i]) - R * std::polar(1.0, k * zn[i]));
    return s;
  };
  // k_z grid on [0, 9/sz]
  std::vector<double> kz, kw;
  {
    const double K = 9.0 / std::min(sz, st);
    for (int pn = 0; pn < 8; ++pn) {
      const double lo = K * pn / 8, hi = K * (pn + 1) / 8;
      for (size_t i = 0; i < gx.size(); ++i) {
        kz.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i]);
        kw.push_back(0.5 * (hi - lo) * gw[i]);
      }
    }
  }
  std::vector<double> D2(kz.size());
  for (size_t i = 0; i < kz.size(); ++i) D2[i] = std::norm(depth(kz[i]));
  double bz = 0.0;  // |int g_z sqrt(2 kappa) e^{-kappa z}|^2
  if (kappa > 0.0 && opt.include_bound_state && opt.reflection == ModeReflection::Derived) {
    double s = 0.0;
    for (size_t i = 0; i < zn.size(); ++i) s += zw[i] * std::exp(-kappa * zn[i]);
    bz = 2 * kappa * s * s;
  }
  auto time2 = [&](double wv) { return 2 * std::numbers::pi * st * st * std::exp(-wv * wv * st * st); };

  std::vector<smear::Axis> ax;
  for (int a = 1; a <= np; ++a)
    ax.push_back(smear::axis_grid(f.widths[size_t(a)], f.widths[size_t(a)], q.n_radial / 4 + 4));
  std::vector<size_t> idx(static_cast<size_t>(np), 0);
  double total = 0.0;
  while (true) {
    double kp2 = 0.0, wt = 1.0;
    for (int a = 0; a < np; ++a) {
      const double k = ax[size_t(a)].k[idx[size_t(a)]];
      kp2 += k * k;
      wt *= ax[size_t(a)].w[idx[size_t(a)]] * std::norm(f.axis_ft(size_t(a + 1), k)) / (2 * std::numbers::pi);
    }
    double cont = 0.0;
    for (size_t i = 0; i < kz.size(); ++i) {
      const double wv = std::sqrt(kp2 + kz[i] * kz[i] + cfg.m_sq);
      cont += kw[i] * D2[i] * time2(wv) / (2 * wv);
    }
    double sum = cont / (2 * std::numbers::pi);
    if (bz > 0.0) {
      const double wb2 = kp2 + cfg.m_sq - kappa * kappa;
      if (wb2 > 0.0) {
        const double wb = std::sqrt(wb2);
        sum += bz * time2(wb) / (2 * wb);
      } else if (wb2 < 0.0) {
        const double l = std::sqrt(-wb2);
        const double g = std::sqrt(2 * std::numbers::pi) * st * std::exp(0.5 * l * l * st * st);
        const double C = g * std::cosh(l * ct), S = g * std::sinh(l * ct);
        sum += bz * (C * C + S * S) / (2 * l);
      }
    }
    total += wt * sum;
    int a = 0;
    for (; a < np; ++a) {
      if (++idx[size_t(a)] < ax[size_t(a)].k.size()) break;
      idx[size_t(a)] = 0;
    }
    if (a == np) break;
  }
  return total * f.amplitude * f.amplitude;
}

inline PositivityReport check_positivity(const ModelConfig& cfg, const std::vector<GaussianTest>& tests,
                                         const StateOptions& opt = {}, double threshold = 1e-8) {
  PositivityReport rep;
  rep.min_interior = rep.min_stress = std::numeric_limits<double>::infinity();
  for (const auto& f : tests) {
    PositivityRow r;
    r.value = smeared_state(cfg, f, opt);
    r.interior = f.center.z >= 3 * f.widths.back();
    rep.scale = std::max(rep.scale, std::abs(r.value));
    (r.interior ? rep.min_interior : rep.min_stress) = std::min(r.interior ? rep.min_interior : rep.min_stress, r.value);
    rep.rows.push_back(r);
  }
  if (rep.rows.empty()) rep.min_interior = rep.min_stress = 0.0;
  rep.pass = !(rep.min_interior < -threshold * rep.scale);
  return rep;
}

// ---- Hadamard subtraction along cone-approach paths

enum class Cone { Direct, Reflected };

inline const char* to_string(Cone c) { return c == Cone::Direct ? "direct" : "reflected"; }

// straight path parameterized by the target interval s: the selected interval equals -s, the other stays
// at least 0.5 away; x' at depth z0
inline PairSeparation cone_path_pair(int d, Cone cone, double s, double z0 = 1.0) {
  if (cone == Cone::Direct) {
    if (d > 2) return separation_from(d, 0.0, std::sqrt(2 * s), z0, z0);
    return separation_from(d, 0.0, 0.0, z0 + std::sqrt(2 * s), z0);
  }
  const double w = 2 * z0;
  return separation_from(d, std::sqrt(w * w - 2 * s), 0.0, z0, z0);
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return v;
}

// domain of reflected coefficients covering a path (eta = sigma_-/w^2 at w = 2 z0)
inline ReflectedDomain path_domain(int d, Cone cone, double s_lo, double s_hi, double z0 = 1.0) {
  ReflectedDomain dom;
  dom.z_prime = z0;
  double e_lo = 1e300, e_hi = -1e300, w_hi = 0.0;
  for (double s : {s_lo, s_hi}) {
    const auto p = cone_path_pair(d, cone, s, z0);
    const double e = p.sigma_minus / (p.w() * p.w());
    e_lo = std::min(e_lo, e);
    e_hi = std::max(e_hi, e);
    w_hi = std::max(w_hi, p.w());
  }
  dom.w_max = w_hi * 1.05;
  dom.eta_center = 0.5 * (e_lo + e_hi);
  dom.eta_half_width = 0.5 * (e_hi - e_lo) + 0.01;
  return dom;
}

struct SubtractionRow {
  double s;
  cplx omega, parametrix, remainder;
};

struct SubtractionReport {
  Cone cone = Cone::Direct;
  double log_slope = 0.0;  // slope of log|W| against log s
  bool pass = false;
  std::vector<SubtractionRow> rows;
};

// least-squares slope of log|y| against log x
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(std::abs(y[i]) + 1e-300);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// kernel under test: the Robin state, or the whole-space vacuum when the spec has no reflected branch
inline cplx state_for_spec(const ParametrixSpec& spec, const PairSeparation& p, double eps) {
  if (!spec.reflected) return vacuum_two_point(spec.cfg, p, eps);
  return robin_state_image_smooth(spec.cfg, p, eps);
}

inline SubtractionReport subtraction_diagnostic(const ParametrixSpec& spec, Cone cone,
                                                const std::vector<double>& eps_sequence = {4e-9, 2e-9, 1e-9},
                                                double s_lo = 1e-4, double s_hi = 1e-1, int n = 13) {
  require(!eps_sequence.empty(), ErrorCode::Usage, "eps sequence is empty");
  SubtractionReport rep;
  rep.cone = cone;
  std::vector<double> xs, ys;
  double scale = 0.0;
  for (double s : log_grid(s_lo, s_hi, n)) {
    const auto p = cone_path_pair(spec.cfg.d, cone, s);
    std::vector<cplx> om, hp, wr;
    for (double e : eps_sequence) {
      om.push_back(state_for_spec(spec, p, e));
      hp.push_back(assemble_parametrix(spec, p, e));
      wr.push_back(om.back() - hp.back());
    }
    SubtractionRow r{s, om.back(), hp.back(), quad::richardson(wr)};
    rep.rows.push_back(r);
    xs.push_back(s);
    ys.push_back(std::abs(r.remainder));
    scale = std::max(scale, std::abs(r.omega));
  }
  // roundoff floor: exact image cancellations leave |W| ~ 1e-17 noise with no meaningful slope
  for (double& y : ys) y += 1e-12 * scale;
  rep.log_slope = log_slope(xs, ys);
  rep.pass = rep.log_slope >= -0.1;
  return rep;
}

// ---- mode-reflection evidence

struct ReflectionEvidence {
  double derived_max_residual = 0.0, paper_max_residual = 0.0;
  double paper_kappa0_residual = 0.0;
  ModeReflection winner = ModeReflection::Derived;
};

inline ReflectionEvidence adjudicate_reflection(const std::vector<double>& kappas = {0.5, 1.0, 5.0}) {
  ReflectionEvidence ev;
  for (double kappa : kappas)
    for (double k = 0.05; k < 20.0; k *= 1.3) {
      ev.derived_max_residual = std::max(ev.derived_max_residual, std::abs(mode_bc_residual(ModeReflection::Derived, k, kappa)));
      ev.paper_max_residual = std::max(ev.paper_max_residual, std::abs(mode_bc_residual(ModeReflection::Paper, k, kappa)));
    }
  for (double k = 0.05; k < 20.0; k *= 1.3)
    ev.paper_kappa0_residual = std::max(ev.paper_kappa0_residual, std::abs(mode_bc_residual(ModeReflection::Paper, k, 0.0)));
  ev.winner = ev.derived_max_residual <= ev.paper_max_residual ? ModeReflection::Derived : ModeReflection::Paper;
  return ev;
}

}  // namespace hmk
