#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "images.hpp"

namespace hmk {

// exponent of the depth smoothing: e^{-kappa s} (DecayForward) or e^{+kappa s} (PaperLemma)
enum class SmoothingDirection { DecayForward, PaperLemma };

inline const char* to_string(SmoothingDirection d) {
  return d == SmoothingDirection::DecayForward ? "DECAY_FORWARD" : "PAPER_LEMMA";
}

inline SmoothingDirection parse_smoothing(const std::string& s) {
  if (s == "DECAY_FORWARD" || s == "decay_forward") return SmoothingDirection::DecayForward;
  if (s == "PAPER_LEMMA" || s == "paper_lemma") return SmoothingDirection::PaperLemma;
  throw Error(ErrorCode::Usage, "unknown smoothing direction '" + s + "'");
}

// G_kappa = G_N + sign * 2 kappa int_0^inf e^{dir kappa s} G_r(w + s) ds
struct RobinConvention {
  SmoothingDirection dir = SmoothingDirection::PaperLemma;
  int correction_sign = 1;

  double exponent() const { return dir == SmoothingDirection::PaperLemma ? 1.0 : -1.0; }
  std::string label() const {
    return std::string(to_string(dir)) + (correction_sign > 0 ? "/+" : "/-");
  }
};

// reflection coefficient of Psi_k(z) = e^{-ikz} - R e^{ikz}
enum class ModeReflection { Derived, Paper };

inline const char* to_string(ModeReflection r) { return r == ModeReflection::Derived ? "DERIVED_R" : "PAPER_R"; }

inline ModeReflection parse_reflection(const std::string& s) {
  if (s == "DERIVED_R" || s == "derived") return ModeReflection::Derived;
  if (s == "PAPER_R" || s == "paper") return ModeReflection::Paper;
  throw Error(ErrorCode::Usage, "unknown mode reflection '" + s + "'");
}

inline cplx reflection_coefficient(ModeReflection r, double k, double kappa) {
  const cplx a(kappa, -k), b(kappa, k);
  return r == ModeReflection::Derived ? a / b : b / a;
}

// (d_z + kappa) Psi_k at z = 0
inline cplx mode_bc_residual(ModeReflection r, double k, double kappa) {
  const cplx R = reflection_coefficient(r, k, kappa);
  return cplx(0, -k) * (1.0 + R) + kappa * (1.0 - R);
}

// ---- Robin-to-Dirichlet map and its inverse kernel

// T_kappa f = f' + kappa f on a uniform grid (4th-order stencils, one-sided near the ends)
inline std::vector<double> robin_to_dirichlet(const std::vector<double>& f, double h, double kappa) {
  const size_t n = f.size();
  require(n >= 5, ErrorCode::Domain, "robin_to_dirichlet needs at least 5 samples");
  require(h > 0.0, ErrorCode::Domain, "grid spacing must be positive");
  std::vector<double> out(n);
  const double c = 1.0 / (12.0 * h);
  for (size_t i = 0; i < n; ++i) {
    double d;
    if (i >= 2 && i + 2 < n) {
      d = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) * c;
    } else if (i == 0) {
      d = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) * c;
    } else if (i == 1) {
      d = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) * c;
    } else if (i + 1 == n) {
      d = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) * c;
    } else {
      d = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) * c;
    }
    out[i] = d + kappa * f[i];
  }
  return out;
}

// Theta(z) e^{-kappa z}, Theta(0) = 1
inline double lkappa(double z, double kappa) { return z >= 0.0 ? std::exp(-kappa * z) : 0.0; }

// int L(z) e^{-ipz} dz in closed form and as printed
inline cplx lkappa_fourier(double p, double kappa) { return 1.0 / cplx(kappa, p); }
inline cplx lkappa_fourier_printed(double p, double kappa) { return 1.0 / cplx(-kappa, p); }

inline cplx lkappa_fourier_numeric(double p, double kappa) {
  require(kappa > 0.0, ErrorCode::Domain, "Fourier transform of L needs kappa > 0");
  const double end = 40.0 / kappa;
  const double width = std::abs(p) > 0.0 ? 2 * std::numbers::pi / std::abs(p) : end;
  auto r = quad::panels([&](double z) { return std::exp(cplx(-kappa * z, -p * z)); }, 0.0, end,
                        std::min(width, end), 1e-12);
  return r.value;
}

struct WeakIdentity {
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

// int (-phi' + kappa phi) L dz against phi(0), phi a Gaussian with the given center and width
inline WeakIdentity lkappa_weak_identity(double kappa, double center, double width) {
  require(width > 0.0, ErrorCode::Domain, "Gaussian width must be positive");
  auto phi = [&](double z) { return std::exp(-(z - center) * (z - center) / (2 * width * width)); };
  auto dphi = [&](double z) { return -(z - center) / (width * width) * phi(z); };
  const double end = std::max(center, 0.0) + 40.0 * width;
  quad::Options o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-13;
  auto r = quad::adaptive([&](double z) { return (-dphi(z) + kappa * phi(z)) * lkappa(z, kappa); }, 0.0, end, o,
                          {std::max(center, 0.0)});
  WeakIdentity w;
  w.lhs = r.value;
  w.rhs = phi(0.0);
  w.residual = std::abs(w.lhs - w.rhs);
  return w;
}

// ---- structural kernels in (tau^2, depth offset u): interval = (tau^2 - u^2)/2

enum class Support { Sigma, SigmaMinus, None };

struct DeltaTerm {
  int order = 0;
  Support on = Support::SigmaMinus;
  std::function<double(double tau_sq, double u)> coeff;
};

struct RegularTerm {
  Support on = Support::SigmaMinus;
  std::function<double(double tau_sq, double u)> coeff;
};

struct DistKernel {
  std::vector<DeltaTerm> delta_terms;
  std::vector<RegularTerm> regular_terms;

  // pointwise regular part (delta pieces are never evaluated pointwise)
  double regular_value(double tau_sq, double u) const {
    double s = 0.0;
    for (const auto& t : regular_terms)
      if (t.on == Support::None || tau_sq - u * u > 0.0) s += t.coeff(tau_sq, u);
    return s;
  }
};

// whole-space commutator without sgn(dt), as a kernel of (tau^2, u)
inline DistKernel whole_space_kernel(const ModelConfig& cfg, Support on) {
  DistKernel k;
  const auto c = closed::causal_delta_coeffs(cfg.d, cfg.mass());
  for (size_t l = 0; l < c.size(); ++l) {
    const double cl = c[l];
    k.delta_terms.push_back({static_cast<int>(l), on, [cl](double, double) { return cl; }});
  }
  const int d = cfg.d;
  const double m = cfg.mass();
  if (!(d % 2 == 0 && d >= 4 && m == 0.0))
    k.regular_terms.push_back(
        {on, [d, m](double tau_sq, double u) { return closed::causal_regular(d, m, 0.5 * (tau_sq - u * u)); }});
  return k;
}

inline DistKernel reflected_whole_space(const ModelConfig& cfg) { return whole_space_kernel(cfg, Support::SigmaMinus); }

// (tau^{-1} d/dtau)^n [e^{a(tau - w)}/tau]
inline double delta_root_derivative(int n, double tau, double w, double a) {
  std::vector<double> c{0.0, 1.0};  // coefficients of tau^{-j}
  for (int it = 0; it < n; ++it) {
    std::vector<double> nc(c.size() + 2, 0.0);
    for (size_t j = 0; j < c.size(); ++j) {
      if (c[j] == 0.0) continue;
      nc[j + 2] += -double(j) * c[j];
      nc[j + 1] += a * c[j];
    }
    c = std::move(nc);
  }
  double s = 0.0;
  for (size_t j = 0; j < c.size(); ++j) s += c[j] * std::pow(tau, -double(j));
  return s * std::exp(a * (tau - w));
}

// int_0^inf e^{dir kappa s} K(tau^2, w + s) ds, delta terms by their root, regular terms by quadrature
inline double smooth_kappa(const DistKernel& K, double tau_sq, double w, double kappa, SmoothingDirection dir) {
  require(w >= 0.0, ErrorCode::Domain, "smooth_kappa needs w = z + z' >= 0");
  require(!(tau_sq == 0.0 && w == 0.0), ErrorCode::Degenerate, "boundary point on the cone");
  require(kappa >= 0.0, ErrorCode::Domain, "smooth_kappa needs kappa >= 0");
  const double a = (dir == SmoothingDirection::PaperLemma ? 1.0 : -1.0) * kappa;
  double total = 0.0;
  const double tau = tau_sq > 0.0 ? std::sqrt(tau_sq) : 0.0;
  // delta^{(n)}(sigma_-(w+s)) = (2 d/dtau^2)^n delta(...), single root at s* = |tau| - w
  for (const auto& t : K.delta_terms) {
    if (tau_sq <= 0.0 || tau < w) continue;
    total += t.coeff(tau_sq, tau) * delta_root_derivative(t.order, tau, w, a);
  }
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-12;
  for (const auto& t : K.regular_terms) {
    if (t.on != Support::None) {
      if (tau_sq <= 0.0 || tau <= w) continue;
      // u = w + s = |tau| cos(theta): sigma_- = tau^2 sin^2(theta)/2, endpoint singularities removed
      const double th_w = std::acos(std::clamp(w / tau, -1.0, 1.0));
      auto f = [&](double th) {
        const double u = tau * std::cos(th);
        return std::exp(a * (u - w)) * t.coeff(tau_sq, u) * tau * std::sin(th);
      };
      auto r = quad::adaptive(f, 0.0, th_w, o);
      require(r.converged, ErrorCode::NonConvergence, "depth smoothing quadrature did not converge");
      total += r.value;
    } else {
      require(a < 0.0, ErrorCode::Domain, "unsupported regular term needs a decaying smoothing direction");
      const double s_max = w + tau + 40.0 / kappa;
      auto r = quad::adaptive([&](double s) { return std::exp(a * s) * t.coeff(tau_sq, w + s); }, 0.0, s_max, o);
      require(r.converged, ErrorCode::NonConvergence, "depth smoothing quadrature did not converge");
      total += r.value;
    }
  }
  return total;
}

// ---- commutators of the boundary-parallel (d-1)-dimensional theory

namespace lowdim {

// Re(-i[W(T) - W(-conj T)]) with T = dt + i eps; M real, zero, or i K (continued through Re M > 0)
inline double commutator_eps(int dim, cplx M, double dt, double eps, double rho) {
  if (dim == 1) {
    if (M.imag() != 0.0) {
      const double K = M.imag();
      return std::cos(K * eps) * std::sinh(K * dt) / K;
    }
    const double m = M.real();
    return m > 0.0 ? std::sin(m * dt) * std::exp(-eps * m) / m : dt;
  }
  const cplx T(dt, eps), Tm(-dt, eps);
  if (dim == 2 && std::abs(M) == 0.0) {
    // K_0(My) -> -ln(My/2) - gamma; the mass cancels in the difference
    const cplx yp = std::sqrt(rho * rho - T * T), ym = std::sqrt(rho * rho - Tm * Tm);
    return (cplx(0, -1) * (-(std::log(yp) - std::log(ym)) / (2 * std::numbers::pi))).real();
  }
  return (cplx(0, -1) * (closed::vacuum(dim, M, T, rho) - closed::vacuum(dim, M, Tm, rho))).real();
}

// eps-free commutator, entire in msq (negative msq gives the growing band)
inline double commutator(int dim, double msq, double dt, double rho) {
  const double M = std::sqrt(std::abs(msq));
  if (dim == 1) {
    if (msq > 0.0) return std::sin(M * dt) / M;
    if (msq < 0.0) return std::sinh(M * dt) / M;
    return dt;
  }
  const double tau_sq = dt * dt - rho * rho;
  if (tau_sq <= 0.0) return 0.0;
  const double tau = std::sqrt(tau_sq);
  if (dim == 2) return 0.5 * sgn(dt) * (msq >= 0.0 ? bessel_j_int(0, M * tau) : bessel_i0(M * tau));
  if (dim == 3)
    return sgn(dt) * (msq >= 0.0 ? std::cos(M * tau) : std::cosh(M * tau)) / (2 * std::numbers::pi * tau);
  throw Error(ErrorCode::Unsupported, "lower-dimensional commutator needs dim <= 3");
}

// decay rate and oscillation frequency in the mass of W(T), W(-conj T)
inline std::pair<double, double> envelope(int dim, double dt, double eps, double rho) {
  if (dim == 1) return {eps, std::abs(dt)};
  const cplx T(dt, eps);
  const cplx y = std::sqrt(rho * rho - T * T);
  return {y.real(), std::abs(y.imag())};
}

}  // namespace lowdim

// bound-state mass squared m^2 - kappa^2 as a complex mass (i K_c when negative)
inline cplx bound_mass(const ModelConfig& cfg) {
  const double mb2 = cfg.m_sq - cfg.kappa * cfg.kappa;
  return mb2 >= 0.0 ? cplx(std::sqrt(mb2), 0.0) : cplx(0.0, std::sqrt(-mb2));
}

// ---- Robin causal propagator

enum class RobinMethod { Closed4dMassless, Convolution, ModeSum };

inline const char* to_string(RobinMethod m) {
  switch (m) {
    case RobinMethod::Closed4dMassless: return "closed_4d_massless";
    case RobinMethod::Convolution: return "convolution";
    case RobinMethod::ModeSum: return "modesum";
  }
  return "unknown";
}

inline RobinMethod parse_robin_method(const std::string& s) {
  if (s == "closed_4d_massless" || s == "closed") return RobinMethod::Closed4dMassless;
  if (s == "convolution") return RobinMethod::Convolution;
  if (s == "modesum") return RobinMethod::ModeSum;
  throw Error(ErrorCode::Usage, "unknown method '" + s + "'");
}

struct RobinOptions {
  RobinConvention convention{};
  ModeReflection reflection = ModeReflection::Derived;
  bool include_bound_state = true;
  QuadratureSpec quad{};
  int richardson_levels = 3;
};

// pieces of the eps-damped mode sum: Neumann images, continuum correction, bound state
struct ModeSumParts {
  double neumann = 0.0, continuum = 0.0, bound = 0.0;
  double total() const { return neumann + continuum + bound; }
};

inline ModeSumParts robin_causal_modesum_parts(const ModelConfig& cfg, const PairSeparation& p, double eps,
                                               const RobinOptions& opt = {}) {
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "Robin mode sum needs d in {2,3,4}");
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  ModeSumParts out;
  if (p.dt == 0.0) return out;
  const int dim = cfg.d - 1;
  const double rho = p.rho(), w = p.w(), dz = p.dz(), kappa = cfg.kappa, m = cfg.mass();
  auto [decay, freq] = lowdim::envelope(dim, p.dt, eps, rho);
  const double k_end = m + 40.0 / decay;
  require(k_end <= opt.quad.k_max, ErrorCode::NonConvergence, "mode sum cutoff exceeds k_max");
  const double width = 2 * std::numbers::pi / std::max(w + freq, 1e-2);
  // Psi Psi^* = 2 cos(k dz) - 2 Re(R e^{ikw}); measure dk/(2 pi) over k > 0
  // R = -1 + 2 kappa/(kappa + ik) splits into the Neumann images and the continuum correction
  const bool corrected = cfg.dirichlet || kappa > 0.0;
  // real part: Neumann images, imaginary part: continuum correction (one commutator per node)
  auto f = [&](double k) {
    const double g = lowdim::commutator_eps(dim, std::sqrt(k * k + cfg.m_sq), p.dt, eps, rho) / std::numbers::pi;
    double c = 0.0;
    if (corrected) {
      const cplx R = cfg.dirichlet ? cplx(1.0) : reflection_coefficient(opt.reflection, k, kappa);
      c = -((R + 1.0) * std::polar(1.0, k * w)).real();
    }
    return cplx((std::cos(k * dz) + std::cos(k * w)) * g, c * g);
  };
  auto r = quad::panels(f, 0.0, k_end, width, opt.quad.rel_tol);
  require(r.converged, ErrorCode::NonConvergence, "Robin mode sum did not converge");
  out.neumann = r.value.real();
  out.continuum = r.value.imag();
  if (!cfg.dirichlet && kappa > 0.0 && opt.include_bound_state && opt.reflection == ModeReflection::Derived)
    out.bound = 2 * kappa * std::exp(-kappa * w) * lowdim::commutator_eps(dim, bound_mass(cfg), p.dt, eps, rho);
  return out;
}

inline double robin_causal_modesum(const ModelConfig& cfg, const PairSeparation& p, double eps,
                                   const RobinOptions& opt = {}) {
  std::vector<double> v;
  for (int i = 0; i < std::max(1, opt.richardson_levels); ++i)
    v.push_back(robin_causal_modesum_parts(cfg, p, eps / std::pow(2.0, i), opt).total());
  return quad::richardson(v);
}

// the Robin correction by depth smoothing of the reflected kernel, without G_N
inline double robin_correction(const ModelConfig& cfg, const PairSeparation& p, const RobinConvention& conv) {
  if (cfg.kappa == 0.0 || p.dt == 0.0) return 0.0;
  const double s = smooth_kappa(reflected_whole_space(cfg), p.tau_sq, p.w(), cfg.kappa, conv.dir);
  return conv.correction_sign * 2 * cfg.kappa * sgn(p.dt) * s;
}

// 4D massless tail in the calibrated normalization: sign sgn (2 kappa/|tau|) e^{dir kappa(|tau| - w)}/(4 pi)
inline double tail_4d_massless(const PairSeparation& p, double kappa, const RobinConvention& conv) {
  if (p.sigma_minus <= 0.0 || p.dt == 0.0) return 0.0;
  const double tau = std::sqrt(p.tau_sq);
  return conv.correction_sign * sgn(p.dt) * 2 * kappa * std::exp(conv.exponent() * kappa * (tau - p.w())) /
         (4 * std::numbers::pi * tau);
}

// the same tail with the printed prefactor: -sgn (kappa/pi)(1/|tau|) e^{-+kappa(|tau| - w)}
inline double tail_4d_massless_printed(const PairSeparation& p, double kappa, SmoothingDirection dir) {
  if (p.sigma_minus <= 0.0 || p.dt == 0.0) return 0.0;
  const double tau = std::sqrt(p.tau_sq);
  const double a = dir == SmoothingDirection::PaperLemma ? 1.0 : -1.0;
  return -sgn(p.dt) * kappa / std::numbers::pi * std::exp(a * kappa * (tau - p.w())) / tau;
}

inline double robin_causal(const ModelConfig& cfg, const PairSeparation& p, double eps, RobinMethod method,
                           const RobinOptions& opt = {}) {
  require(p.z >= 0.0 && p.z_prime >= 0.0, ErrorCode::Domain, "Robin kernels need z, z' >= 0");
  if (method == RobinMethod::ModeSum) return robin_causal_modesum(cfg, p, eps, opt);
  if (cfg.dirichlet) return image_eval(dirichlet(KernelId::Causal), cfg, p, eps).real();
  const double gn = image_eval(neumann(KernelId::Causal), cfg, p, eps).real();
  if (method == RobinMethod::Closed4dMassless) {
    require(cfg.d == 4 && cfg.m_sq == 0.0, ErrorCode::Unsupported, "closed_4d_massless needs d=4, m=0");
    require(std::abs(p.sigma_minus) > 1e-8, ErrorCode::OnCone, "closed form on the reflected cone");
    return gn + tail_4d_massless(p, cfg.kappa, opt.convention);
  }
  require(cfg.d >= 2 && cfg.d <= 4, ErrorCode::Unsupported, "convolution needs d in {2,3,4}");
  require(std::abs(p.sigma_minus) > 1e-8, ErrorCode::OnCone, "convolution on the reflected cone");
  return gn + robin_correction(cfg, p, opt.convention);
}

struct SupportValue {
  double value = 0.0;
  bool boundary_of_support = false;
};

inline SupportValue robin_retarded(const ModelConfig& cfg, const PairSeparation& p, double eps, RobinMethod method,
                                   const RobinOptions& opt = {}) {
  if (p.dt == 0.0) return {0.0, true};
  return {p.dt > 0.0 ? robin_causal(cfg, p, eps, method, opt) : 0.0, false};
}

inline SupportValue robin_advanced(const ModelConfig& cfg, const PairSeparation& p, double eps, RobinMethod method,
                                   const RobinOptions& opt = {}) {
  if (p.dt == 0.0) return {0.0, true};
  return {p.dt < 0.0 ? -robin_causal(cfg, p, eps, method, opt) : 0.0, false};
}

// ---- support scan

struct GridSpec {
  int n_pairs = 1000;
  double t_range = 3.0;   // |dt| <= t_range
  double rho_max = 3.0;
  double z_min = 0.05, z_max = 2.5;
  double cone_margin = 0.05;
  unsigned long long seed = 20240917ULL;
};

enum class Stratum { BothTimelike, DirectOnly, DoublySpacelike };

inline const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::BothTimelike: return "both_timelike";
    case Stratum::DirectOnly: return "direct_only";
    case Stratum::DoublySpacelike: return "doubly_spacelike";
  }
  return "unknown";
}

inline Stratum stratum_of(const PairSeparation& p) {
  if (p.sigma_minus > 0.0) return Stratum::BothTimelike;
  return p.sigma > 0.0 ? Stratum::DirectOnly : Stratum::DoublySpacelike;
}

// seeded pairs, equal quota per stratum, kept off both cones by the margin
inline std::vector<PairSeparation> stratified_pairs(int d, const GridSpec& g) {
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> ut(-g.t_range, g.t_range), ur(0.0, g.rho_max), uz(g.z_min, g.z_max);
  const int quota = (g.n_pairs + 2) / 3;
  int count[3] = {0, 0, 0};
  std::vector<PairSeparation> out;
  for (long tries = 0; static_cast<int>(out.size()) < 3 * quota && tries < 100000000L; ++tries) {
    const double dt = ut(rng), rho = d > 2 ? ur(rng) : 0.0, z = uz(rng), zp = uz(rng);
    auto p = separation_from(d, dt, rho, z, zp);
    if (std::abs(p.sigma) < g.cone_margin || std::abs(p.sigma_minus) < g.cone_margin) continue;
    if (p.dt == 0.0) continue;
    const int s = static_cast<int>(stratum_of(p));
    if (count[s] >= quota) continue;
    ++count[s];
    out.push_back(p);
  }
  return out;
}

struct StratumSummary {
  int count = 0;
  double max_abs = 0.0;
  double max_dev = 0.0;  // |mode sum - pointwise reference| where a reference exists
};

struct SupportScanReport {
  StratumSummary strata[3];
  double eps = 0.0;
  double floor = 0.0;           // eps-floor: max deviation on the timelike (sigma > 0) strata
  double spacelike_max = 0.0;
  bool pass = false;
  std::vector<std::pair<PairSeparation, double>> rows;
};

inline SupportScanReport support_scan(const ModelConfig& cfg, const GridSpec& grid, double eps,
                                      const RobinOptions& opt = {}) {
  SupportScanReport rep;
  rep.eps = eps;
  RobinOptions single = opt;
  single.richardson_levels = 1;
  for (const auto& p : stratified_pairs(cfg.d, grid)) {
    const double v = robin_causal_modesum(cfg, p, eps, single);
    const auto s = stratum_of(p);
    auto& st = rep.strata[static_cast<int>(s)];
    ++st.count;
    st.max_abs = std::max(st.max_abs, std::abs(v));
    if (s != Stratum::DoublySpacelike) {
      const double ref = robin_causal(cfg, p, eps, RobinMethod::Convolution, opt);
      st.max_dev = std::max(st.max_dev, std::abs(v - ref));
      rep.floor = std::max(rep.floor, std::abs(v - ref));
    }
    rep.rows.emplace_back(p, v);
  }
  rep.spacelike_max = rep.strata[static_cast<int>(Stratum::DoublySpacelike)].max_abs;
  rep.pass = rep.spacelike_max < 10.0 * rep.floor;
  return rep;
}

// ---- adjudication of the smoothing convention against the mode sum

struct VariantMismatch {
  RobinConvention convention;
  double max_rel = 0.0;
};

struct SmoothingAdjudication {
  std::vector<VariantMismatch> variants;
  RobinConvention winner;
  double winner_mismatch = 0.0;
  double runner_up_mismatch = 0.0;
};

inline SmoothingAdjudication adjudicate_smoothing(const ModelConfig& cfg, const std::vector<PairSeparation>& probes,
                                                  double eps, const RobinOptions& opt = {}) {
  require(cfg.kappa > 0.0 && !cfg.dirichlet, ErrorCode::Domain, "adjudication needs 0 < kappa < infinity");
  std::vector<double> ms;
  double scale = 0.0;
  for (const auto& p : probes) {
    ms.push_back(robin_causal_modesum(cfg, p, eps, opt));
    scale = std::max(scale, std::abs(ms.back()));
  }
  SmoothingAdjudication a;
  for (auto dir : {SmoothingDirection::DecayForward, SmoothingDirection::PaperLemma})
    for (int sign : {1, -1}) {
      VariantMismatch vm{{dir, sign}, 0.0};
      for (size_t i = 0; i < probes.size(); ++i) {
        const double c = image_eval(neumann(KernelId::Causal), cfg, probes[i], eps).real() +
                         robin_correction(cfg, probes[i], vm.convention);
        vm.max_rel = std::max(vm.max_rel, std::abs(c - ms[i]) / std::max(scale, 1e-300));
      }
      a.variants.push_back(vm);
    }
  auto sorted = a.variants;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.max_rel < y.max_rel; });
  a.winner = sorted[0].convention;
  a.winner_mismatch = sorted[0].max_rel;
  a.runner_up_mismatch = sorted[1].max_rel;
  return a;
}

}  // namespace hmk
