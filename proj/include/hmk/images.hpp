#pragma once

#include <cmath>

#include "minkowski.hpp"

namespace hmk {

// separation to the mirror image of x': z - z' becomes z + z'
inline PairSeparation image_separation(const PairSeparation& p) {
  PairSeparation r = p;
  r.z_prime = -p.z_prime;
  r.sigma = p.sigma_minus;
  r.sigma_minus = p.sigma;
  return r;
}

struct ImageKernel {
  KernelId base = KernelId::Causal;
  int sign = 1;  // +1 Neumann, -1 Dirichlet
};

inline ImageKernel neumann(KernelId base) { return {base, 1}; }
inline ImageKernel dirichlet(KernelId base) { return {base, -1}; }

inline cplx whole_space_eval(KernelId base, const ModelConfig& cfg, const PairSeparation& p, double eps,
                             EvalMethod method = EvalMethod::Closed, const QuadratureSpec& q = {}) {
  switch (base) {
    case KernelId::Causal:
      return method == EvalMethod::Closed ? causal_closed(cfg, p) : causal_modesum(cfg, p, eps, q);
    case KernelId::Retarded:
      return p.dt > 0 ? whole_space_eval(KernelId::Causal, cfg, p, eps, method, q) : 0.0;
    case KernelId::Advanced:
      return p.dt < 0 ? -whole_space_eval(KernelId::Causal, cfg, p, eps, method, q) : 0.0;
    case KernelId::Vacuum: return vacuum_two_point(cfg, p, eps, method, q);
    case KernelId::Feynman: return feynman_whole(cfg, p, eps);
    default: throw Error(ErrorCode::Unsupported, "not a whole-space kernel: " + to_string(base));
  }
}

inline cplx image_eval(const ImageKernel& ik, const ModelConfig& cfg, const PairSeparation& p, double eps,
                       EvalMethod method = EvalMethod::Closed, const QuadratureSpec& q = {}) {
  require(p.z >= 0.0 && p.z_prime >= 0.0, ErrorCode::Domain, "image kernels need z, z' >= 0");
  require(ik.sign == 1 || ik.sign == -1, ErrorCode::Domain, "image sign must be +-1");
  return whole_space_eval(ik.base, cfg, p, eps, method, q) +
         double(ik.sign) * whole_space_eval(ik.base, cfg, image_separation(p), eps, method, q);
}

// smeared d_t G at equal time from the damped modes: int d^n k/(2pi)^n e^{-eps w} e^{ik.x} f^(k)
// (+ sign times the mirrored source), f a spatial Gaussian; returns the recovered value at x
inline double equal_time_recovery(const ModelConfig& cfg, const GaussianTest& f, const Point& x, int image_sign,
                                  double eps, const QuadratureSpec& q = {}) {
  const int n = cfg.d - 1;
  require(n >= 1 && n <= 3, ErrorCode::Unsupported, "equal-time recovery needs d in {2,3,4}");
  std::vector<double> xc(x.x_perp);
  xc.push_back(x.z);
  std::vector<smear::Axis> ax;
  for (int a = 1; a <= n; ++a) {
    const double c = a == n ? f.center.z : f.center.x_perp[static_cast<size_t>(a - 1)];
    const double v = xc[static_cast<size_t>(a - 1)];
    const double extent = a == n && image_sign != 0 ? std::max(std::abs(v - c), std::abs(v + c)) : std::abs(v - c);
    ax.push_back(smear::axis_grid(f.widths[static_cast<size_t>(a)], f.widths[static_cast<size_t>(a)],
                                  q.n_radial / 4 + 4, extent));
  }
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  cplx total = 0.0;
  while (true) {
    double k2 = 0.0, wt = 1.0;
    cplx direct = 1.0, mirror = 1.0;
    for (int a = 0; a < n; ++a) {
      const double k = ax[static_cast<size_t>(a)].k[idx[static_cast<size_t>(a)]];
      k2 += k * k;
      wt *= ax[static_cast<size_t>(a)].w[idx[static_cast<size_t>(a)]];
      const cplx phase = std::polar(1.0, k * xc[static_cast<size_t>(a)]);
      direct *= phase * f.axis_ft(static_cast<size_t>(a + 1), -k);
      // mirror source: z' -> -z' flips the sign of k in the depth factor only
      mirror *= phase * f.axis_ft(static_cast<size_t>(a + 1), a + 1 == n ? k : -k);
    }
    const double w = std::sqrt(k2 + cfg.m_sq);
    total += wt * std::exp(-eps * w) * (direct + double(image_sign) * mirror);
    int a = 0;
    for (; a < n; ++a) {
      if (++idx[static_cast<size_t>(a)] < ax[static_cast<size_t>(a)].k.size()) break;
      idx[static_cast<size_t>(a)] = 0;
    }
    if (a == n) break;
  }
  return (total * std::pow(2 * std::numbers::pi, -n)).real() * f.amplitude;
}

struct ImageEqualTimeReport {
  double value_residual = 0.0;  // max |G| at dt = 0
  double delta_residual = 0.0;  // relative error of recovered f(center)
  double image_contribution = 0.0;
};

inline ImageEqualTimeReport image_equal_time_check(const ImageKernel& ik, const ModelConfig& cfg,
                                                   const QuadratureSpec& q = {}, double width = 0.2,
                                                   double center_z = 1.0) {
  require(ik.base == KernelId::Causal, ErrorCode::Domain, "equal-time check needs the causal kernel");
  ImageEqualTimeReport r;
  for (double rho : {0.3, 1.0, 2.5})
    for (double zp : {0.2, 1.0}) {
      auto p = separation_from(cfg.d, 0.0, cfg.d > 2 ? rho : 0.0, 0.7 + (cfg.d > 2 ? 0.0 : rho), zp);
      r.value_residual = std::max(r.value_residual,
                                  std::abs(image_eval(ik, cfg, p, 1e-3, EvalMethod::ModeSum, q)));
    }
  GaussianTest f;
  f.center = make_point(cfg.d, 0.0, center_z);
  f.widths.assign(static_cast<size_t>(cfg.d), width);
  const double eps = 1e-7;
  const double rec = equal_time_recovery(cfg, f, f.center, ik.sign, eps, q);
  const double plain = equal_time_recovery(cfg, f, f.center, 0, eps, q);
  r.delta_residual = std::abs(rec - f(f.center)) / std::abs(f(f.center));
  r.image_contribution = std::abs(rec - plain);
  return r;
}

}  // namespace hmk
