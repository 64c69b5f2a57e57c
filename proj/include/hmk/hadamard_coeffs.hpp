#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "minkowski.hpp"
#include "quadrature.hpp"
#include "robin_transform.hpp"
#include "specfun.hpp"

namespace hmk {

enum class CoeffKind { U, V, UPrime, VPrime };
enum class Provenance { ConstantAnsatz, RayTransport, BellSeries };

inline const char* to_string(CoeffKind k) {
  switch (k) {
    case CoeffKind::U: return "u";
    case CoeffKind::V: return "v";
    case CoeffKind::UPrime: return "u_prime";
    case CoeffKind::VPrime: return "v_prime";
  }
  return "?";
}

inline CoeffKind parse_coeff_kind(const std::string& s) {
  if (s == "u") return CoeffKind::U;
  if (s == "v") return CoeffKind::V;
  if (s == "u_prime" || s == "uprime") return CoeffKind::UPrime;
  if (s == "v_prime" || s == "vprime") return CoeffKind::VPrime;
  throw Error(ErrorCode::Usage, "unsupported coefficient kind '" + s + "'");
}

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ConstantAnsatz: return "constant_ansatz";
    case Provenance::RayTransport: return "ray_transport";
    case Provenance::BellSeries: return "bell_series";
  }
  return "?";
}

inline bool is_reflected(CoeffKind k) { return k == CoeffKind::UPrime || k == CoeffKind::VPrime; }

// half the power of the leading singularity, (d-2)/2
inline double hadamard_n(int d) { return 0.5 * (d - 2); }

// Level equation: P(pred) + a D f + b f = 0, D the Euler operator about x' (direct) or its image (reflected).
struct TransportConstants {
  double a = 1.0, b = 0.0;
  bool has_pred = false;
  CoeffKind pred_kind = CoeffKind::U;
  int pred_j = 0;
};

inline TransportConstants transport_constants(CoeffKind kind, int j, int d) {
  const bool refl = is_reflected(kind);
  const CoeffKind U = refl ? CoeffKind::UPrime : CoeffKind::U;
  const CoeffKind V = refl ? CoeffKind::VPrime : CoeffKind::V;
  TransportConstants c;
  const bool is_u = kind == CoeffKind::U || kind == CoeffKind::UPrime;
  if (is_u) {
    if (j == 0) return c;
    c.a = 2.0 * j + 2.0 - d;
    c.b = j * c.a;
    c.has_pred = true;
    c.pred_kind = U;
    c.pred_j = j - 1;
    return c;
  }
  require(d % 2 == 0, ErrorCode::Domain, "V coefficients exist only for even d");
  if (j == 0) {
    c.a = 2.0;
    c.b = d - 2.0;
    c.has_pred = d >= 4;
    c.pred_kind = U;
    c.pred_j = (d - 2) / 2 - 1;
    return c;
  }
  c.a = 2.0 * j;
  c.b = j * (d + 2.0 * j - 2.0);
  c.has_pred = true;
  c.pred_kind = V;
  c.pred_j = j - 1;
  return c;
}

// pair with given sigma_- and w for fixed z'; tau^2 is stored directly so unphysical
// regions (needed by stencils) stay representable
inline PairSeparation pair_reduced(int d, double sigma_minus, double w, double zp) {
  PairSeparation p;
  p.z_prime = zp;
  p.z = w - zp;
  p.tau_sq = 2.0 * sigma_minus + w * w;
  p.dx_perp.assign(static_cast<size_t>(std::max(0, d - 2)), 0.0);
  if (p.tau_sq >= 0.0) p.dt = std::sqrt(p.tau_sq);
  else if (d > 2) p.dx_perp[0] = std::sqrt(-p.tau_sq);
  p.sigma_minus = sigma_minus;
  p.sigma = 0.5 * (p.tau_sq - p.dz() * p.dz());
  return p;
}

inline PairSeparation pair_from_sigma(int d, double sigma) {
  PairSeparation p = pair_reduced(d, sigma - 2.0, 2.0, 1.0);  // z = z' = 1: sigma_- = sigma - 2
  p.sigma = sigma;
  return p;
}

class ReflectedGrid;

struct CoeffField {
  CoeffKind kind = CoeffKind::U;
  int j = 0;
  Provenance provenance = Provenance::ConstantAnsatz;
  std::function<double(const PairSeparation&)> eval;
  std::shared_ptr<const ReflectedGrid> grid;  // set for ray-transported fields
  int level = -1;

  double operator()(const PairSeparation& p) const { return eval(p); }
};

// ---- direct coefficients

inline std::vector<double> direct_u_constants(const ModelConfig& cfg, int j_max) {
  const int d = cfg.d;
  const int count = d % 2 == 0 ? std::max(0, (d - 2) / 2) : j_max + 1;
  std::vector<double> u;
  if (count > 0) u.push_back(1.0);
  for (int j = 0; j + 1 < count; ++j)
    u.push_back(-cfg.m_sq * u.back() / ((j + 1.0) * (2.0 * j + 4.0 - d)));
  return u;
}

inline std::vector<double> direct_v_constants(const ModelConfig& cfg, int j_max) {
  const int d = cfg.d;
  if (d % 2 == 1) return {};
  std::vector<double> v;
  if (d == 2) v.push_back(1.0);
  else v.push_back(-cfg.m_sq * direct_u_constants(cfg, 0).back() / (d - 2.0));
  for (int j = 0; j < j_max; ++j) v.push_back(-cfg.m_sq * v.back() / ((j + 1.0) * (d + 2.0 * j)));
  return v;
}

namespace detail {

// P f for f(sigma) = 2 sigma f'' + d f' + m^2 f (Lorentz-invariant direct fields)
inline double box_sigma(const std::function<double(double)>& f, double s, int d, double msq, double h) {
  const double fm2 = f(s - 2 * h), fm1 = f(s - h), f0 = f(s), fp1 = f(s + h), fp2 = f(s + 2 * h);
  const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
  return 2 * s * d2 + d * d1 + msq * f0;
}

}  // namespace detail

// Regular solution of a D f + b f = -S along rays from x': with D = 2 sigma d/dsigma,
// f(sigma) = -(1/b) int_0^1 S(sigma u^{2a/b}) du; b = 0 keeps the coincidence value.
inline std::vector<std::function<double(double)>> direct_transport_levels(const ModelConfig& cfg, CoeffKind kind,
                                                                          int j_max, double h = 1e-3) {
  const int d = cfg.d;
  std::vector<double> gx, gw;
  quad::gauss_legendre(20, gx, gw);
  std::vector<std::function<double(double)>> lv;
  const auto u_levels = (kind == CoeffKind::V && d >= 4) ? direct_transport_levels(cfg, CoeffKind::U, 0, h)
                                                         : std::vector<std::function<double(double)>>{};
  const int count = kind == CoeffKind::U ? static_cast<int>(direct_u_constants(cfg, j_max).size()) : j_max + 1;
  for (int j = 0; j < count; ++j) {
    const auto tc = transport_constants(kind, j, d);
    if (!tc.has_pred) {
      lv.push_back([](double) { return 1.0; });  // [u_0] = 1, and [v_0] = 1 in d = 2
      continue;
    }
    const auto pred = tc.pred_kind == kind ? lv[static_cast<size_t>(tc.pred_j)] : u_levels.back();
    const double a = tc.a, b = tc.b, msq = cfg.m_sq;
    lv.push_back([=](double s) {
      double acc = 0.0;
      for (size_t i = 0; i < gx.size(); ++i) {
        const double u = 0.5 * (gx[i] + 1.0);
        acc += 0.5 * gw[i] * detail::box_sigma(pred, s * std::pow(u, 2.0 * a / b), d, msq, h);
      }
      return -acc / b;
    });
  }
  return lv;
}

// max over a sigma grid of |P(pred) + a D f + b f| for direct fields
inline double direct_transport_residual(const ModelConfig& cfg, CoeffKind kind, int j,
                                        const std::function<double(double)>& f,
                                        const std::function<double(double)>& pred, double h = 1e-3) {
  const auto tc = transport_constants(kind, j, cfg.d);
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double s = -1.0 + 0.1 * i;
    const double df = (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h);
    double r = tc.a * 2 * s * df + tc.b * f(s);
    if (tc.has_pred) r += detail::box_sigma(pred, s, cfg.d, cfg.m_sq, h);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

struct DirectCoeffs {
  std::vector<CoeffField> u, v;
  double ansatz_residual = 0.0;
};

// constant ansatz first; accepted iff its transport residual is below 1e-10, else ray transport
inline DirectCoeffs direct_coeffs(const ModelConfig& cfg, int j_max = 2) {
  require(j_max >= 0 && j_max <= 4, ErrorCode::Domain, "j_max exceeds supported stencil depth (4)");
  DirectCoeffs out;
  const auto uc = direct_u_constants(cfg, j_max);
  const auto vc = direct_v_constants(cfg, j_max);
  auto constant = [](double c) { return std::function<double(double)>([c](double) { return c; }); };
  double worst = 0.0;
  for (size_t j = 0; j < uc.size(); ++j)
    worst = std::max(worst, direct_transport_residual(cfg, CoeffKind::U, static_cast<int>(j), constant(uc[j]),
                                                      constant(j ? uc[j - 1] : 0.0)));
  for (size_t j = 0; j < vc.size(); ++j) {
    const auto tc = transport_constants(CoeffKind::V, static_cast<int>(j), cfg.d);
    const double pred = !tc.has_pred ? 0.0 : tc.pred_kind == CoeffKind::U ? uc.back() : vc[j - 1];
    worst = std::max(worst, direct_transport_residual(cfg, CoeffKind::V, static_cast<int>(j), constant(vc[j]),
                                                      constant(pred)));
  }
  out.ansatz_residual = worst;
  const bool accept = worst < 1e-10;
  auto wrap = [&](CoeffKind k, int j, std::function<double(double)> f, Provenance pv) {
    CoeffField c;
    c.kind = k;
    c.j = j;
    c.provenance = pv;
    c.eval = [f](const PairSeparation& p) { return f(p.sigma); };
    return c;
  };
  if (accept) {
    for (size_t j = 0; j < uc.size(); ++j)
      out.u.push_back(wrap(CoeffKind::U, int(j), constant(uc[j]), Provenance::ConstantAnsatz));
    for (size_t j = 0; j < vc.size(); ++j)
      out.v.push_back(wrap(CoeffKind::V, int(j), constant(vc[j]), Provenance::ConstantAnsatz));
    return out;
  }
  const auto ut = direct_transport_levels(cfg, CoeffKind::U, j_max);
  for (size_t j = 0; j < ut.size(); ++j) out.u.push_back(wrap(CoeffKind::U, int(j), ut[j], Provenance::RayTransport));
  if (cfg.d % 2 == 0) {
    const auto vt = direct_transport_levels(cfg, CoeffKind::V, j_max);
    for (size_t j = 0; j < vt.size(); ++j)
      out.v.push_back(wrap(CoeffKind::V, int(j), vt[j], Provenance::RayTransport));
  }
  return out;
}

// ---- reflected coefficients by ray transport in (eta = sigma_-/w^2, y = ln w)

struct ReflectedDomain {
  double z_prime = 0.5;   // boundary crossing of every ray sits at w = z'
  double w_max = 4.0;
  double eta_center = 0.0;
  double eta_half_width = 0.0;
};

struct TransportSettings {
  double h_ray = 0.0;  // 0: 1e-3 of the y-extent
  double h_eta = 0.01;
};

class ReflectedGrid {
 public:
  struct Level {
    CoeffKind kind;
    int j;
    std::vector<double> f;
    int i_lo, i_hi, k_lo, k_hi;  // valid node range
    std::vector<double> seed;    // boundary data imposed at y_b, per eta line
  };

  ReflectedGrid(const ModelConfig& cfg, int j_max, const ReflectedDomain& dom, const TransportSettings& ts = {})
      : cfg_(cfg), dom_(dom) {
    require(!cfg.dirichlet, ErrorCode::Domain, "ray transport needs finite kappa");
    require(dom.z_prime > 0.0, ErrorCode::Domain, "domain touches z + z' = 0");
    require(dom.w_max >= dom.z_prime, ErrorCode::Domain, "w_max below the boundary crossing");
    require(j_max >= 0 && j_max <= 4, ErrorCode::Domain, "j_max exceeds supported stencil depth (4)");
    const int d = cfg.d;
    std::vector<std::pair<CoeffKind, int>> order;
    const int nu = d % 2 == 0 ? (d - 2) / 2 : j_max + 1;
    for (int j = 0; j < nu; ++j) order.push_back({CoeffKind::UPrime, j});
    if (d % 2 == 0)
      for (int j = 0; j <= j_max; ++j) order.push_back({CoeffKind::VPrime, j});
    const int L = static_cast<int>(order.size());
    const int margin = 2 * L + 4;

    yb_ = std::log(dom.z_prime);
    const double ytop = std::log(dom.w_max);
    h_ = ts.h_ray > 0.0 ? ts.h_ray : 1e-3 * std::max(ytop - yb_, 0.5);
    he_ = ts.h_eta;
    const int above = static_cast<int>(std::ceil((ytop - yb_) / h_));
    i0_ = margin;
    ny_ = margin + above + 1 + margin;
    const int kh = static_cast<int>(std::ceil(dom.eta_half_width / he_));
    kc_ = kh + margin;
    nk_ = 2 * kc_ + 1;

    for (const auto& [kind, j] : order) build_level(kind, j);
  }

  const ModelConfig& cfg() const { return cfg_; }
  const ReflectedDomain& domain() const { return dom_; }
  double h_ray() const { return h_; }
  double h_eta() const { return he_; }
  const std::vector<Level>& levels() const { return levels_; }
  double y_of(int i) const { return yb_ + (i - i0_) * h_; }
  double eta_of(int k) const { return dom_.eta_center + (k - kc_) * he_; }
  int boundary_index() const { return i0_; }

  int find(CoeffKind kind, int j) const {
    for (size_t l = 0; l < levels_.size(); ++l)
      if (levels_[l].kind == kind && levels_[l].j == j) return static_cast<int>(l);
    return -1;
  }

  double node(int l, int k, int i) const { return levels_[static_cast<size_t>(l)].f[idx(k, i)]; }

  // bicubic interpolation inside the valid range of the level
  double value(int l, double eta, double y) const {
    const Level& lv = levels_[static_cast<size_t>(l)];
    const double fi = (y - yb_) / h_ + i0_, fk = (eta - dom_.eta_center) / he_ + kc_;
    int i = static_cast<int>(std::floor(fi)), k = static_cast<int>(std::floor(fk));
    require(i - 1 >= lv.i_lo && i + 2 <= lv.i_hi && k - 1 >= lv.k_lo && k + 2 <= lv.k_hi, ErrorCode::Domain,
            "ray crossing outside cached grid");
    double wy[4], we[4];
    lagrange4(fi - i, wy);
    lagrange4(fk - k, we);
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s += we[a] * wy[b] * lv.f[idx(k - 1 + a, i - 1 + b)];
    return s;
  }

  // residual |S + a f_y + b f| on interior nodes, and the largest seed mismatch
  std::pair<double, double> transport_residual(int l) const {
    const Level& lv = levels_[static_cast<size_t>(l)];
    const auto tc = transport_constants(lv.kind, lv.j, cfg_.d);
    const int p = pred_index(tc);
    double worst = 0.0, seed = 0.0;
    for (int k = lv.k_lo + 2; k <= lv.k_hi - 2; ++k) {
      for (int i = lv.i_lo + 2; i <= lv.i_hi - 2; ++i) {
        const double fy = d1y(lv.f, k, i);
        double r = tc.a * fy + tc.b * lv.f[idx(k, i)];
        if (p >= 0) r += source(p, k, i);
        worst = std::max(worst, std::abs(r));
      }
      seed = std::max(seed, std::abs(lv.f[idx(k, i0_)] - lv.seed[static_cast<size_t>(k)]));
    }
    return {worst, seed};
  }

 private:
  ModelConfig cfg_;
  ReflectedDomain dom_;
  double yb_ = 0.0, h_ = 1e-3, he_ = 0.01;
  int i0_ = 0, ny_ = 0, kc_ = 0, nk_ = 0;
  std::vector<Level> levels_;

  size_t idx(int k, int i) const { return static_cast<size_t>(k) * static_cast<size_t>(ny_) + static_cast<size_t>(i); }

  static void lagrange4(double t, double* w) {  // nodes -1, 0, 1, 2
    w[0] = -t * (t - 1) * (t - 2) / 6;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2;
    w[2] = -(t + 1) * t * (t - 2) / 2;
    w[3] = (t + 1) * t * (t - 1) / 6;
  }

  double d1y(const std::vector<double>& f, int k, int i) const {
    return (f[idx(k, i - 2)] - 8 * f[idx(k, i - 1)] + 8 * f[idx(k, i + 1)] - f[idx(k, i + 2)]) / (12 * h_);
  }
  double d1e(const std::vector<double>& f, int k, int i) const {
    return (f[idx(k - 2, i)] - 8 * f[idx(k - 1, i)] + 8 * f[idx(k + 1, i)] - f[idx(k + 2, i)]) / (12 * he_);
  }
  double d2y(const std::vector<double>& f, int k, int i) const {
    return (-f[idx(k, i - 2)] + 16 * f[idx(k, i - 1)] - 30 * f[idx(k, i)] + 16 * f[idx(k, i + 1)] -
            f[idx(k, i + 2)]) /
           (12 * h_ * h_);
  }
  double d2e(const std::vector<double>& f, int k, int i) const {
    return (-f[idx(k - 2, i)] + 16 * f[idx(k - 1, i)] - 30 * f[idx(k, i)] + 16 * f[idx(k + 1, i)] -
            f[idx(k + 2, i)]) /
           (12 * he_ * he_);
  }
  double dey(const std::vector<double>& f, int k, int i) const {
    const double c[5] = {1, -8, 0, 8, -1};
    double s = 0.0;
    for (int a = 0; a < 5; ++a)
      if (c[a] != 0.0) s += c[a] * d1y(f, k - 2 + a, i);
    return s / (12 * he_);
  }

  int pred_index(const TransportConstants& tc) const { return tc.has_pred ? find(tc.pred_kind, tc.pred_j) : -1; }

  // P applied to level l at node (k, i): w^2 box = -(2e + 4e^2) G_ee + (2 + 4e) G_ey + (d - 4 - 6e) G_e - G_yy + G_y
  double source(int l, int k, int i) const {
    const auto& f = levels_[static_cast<size_t>(l)].f;
    const double e = eta_of(k), w = std::exp(y_of(i));
    const double box = -(2 * e + 4 * e * e) * d2e(f, k, i) + (2 + 4 * e) * dey(f, k, i) +
                       (cfg_.d - 4 - 6 * e) * d1e(f, k, i) - d2y(f, k, i) + d1y(f, k, i);
    return box / (w * w) + cfg_.m_sq * f[idx(k, i)];
  }

  // (d_z + kappa) G at the boundary crossing: d_z = [-(1 + 2 eta) d_eta + d_y]/w
  double seed_operator(int l, int k) const {
    const auto& f = levels_[static_cast<size_t>(l)].f;
    const double e = eta_of(k), w = dom_.z_prime;
    return (-(1 + 2 * e) * d1e(f, k, i0_) + d1y(f, k, i0_)) / w + cfg_.kappa * f[idx(k, i0_)];
  }

  void build_level(CoeffKind kind, int j) {
    const int d = cfg_.d;
    const auto tc = transport_constants(kind, j, d);
    const int p = pred_index(tc);
    const auto uc = direct_u_constants(cfg_, j + 1);
    const auto vc = direct_v_constants(cfg_, j + 1);
    const double n = hadamard_n(d), w = dom_.z_prime, kappa = cfg_.kappa;

    Level lv{kind, j, std::vector<double>(static_cast<size_t>(nk_ * ny_), 0.0), 0, ny_ - 1, 0, nk_ - 1, {}};
    if (p >= 0) {
      const Level& pl = levels_[static_cast<size_t>(p)];
      lv.i_lo = pl.i_lo + 2;
      lv.i_hi = pl.i_hi - 2;
      lv.k_lo = pl.k_lo + 2;
      lv.k_hi = pl.k_hi - 2;
    }
    require(lv.i_lo < i0_ && lv.i_hi > i0_ && lv.k_hi - lv.k_lo >= 3, ErrorCode::Domain, "transport grid too small");

    lv.seed.assign(static_cast<size_t>(nk_), 0.0);
    for (int k = lv.k_lo; k <= lv.k_hi; ++k) {
      double s;
      const bool is_u = kind == CoeffKind::UPrime;
      if (!tc.has_pred) s = is_u ? uc[0] : vc[0];
      else if (is_u) s = uc[static_cast<size_t>(j)] + (kappa * uc[static_cast<size_t>(j - 1)] + seed_operator(p, k)) / ((j - n) * w);
      else if (j == 0) s = vc[0] + (kappa * uc.at(static_cast<size_t>(tc.pred_j)) + seed_operator(p, k)) / w;
      else s = vc[static_cast<size_t>(j)] + (kappa * vc[static_cast<size_t>(j - 1)] + seed_operator(p, k)) / (j * w);
      lv.seed[static_cast<size_t>(k)] = s;
    }

    const double A = -tc.b / tc.a, B = -1.0 / tc.a;
    std::vector<double> S(static_cast<size_t>(ny_), 0.0);
    for (int k = lv.k_lo; k <= lv.k_hi; ++k) {
      for (int i = lv.i_lo; i <= lv.i_hi; ++i) S[static_cast<size_t>(i)] = p >= 0 ? source(p, k, i) : 0.0;
      // source at the midpoint between i and i + 1 by cubic interpolation
      auto smid = [&](int i) {
        auto at = [&](int q) { return S[static_cast<size_t>(q)]; };
        if (i - 1 < lv.i_lo) return (5 * at(i) + 15 * at(i + 1) - 5 * at(i + 2) + at(i + 3)) / 16;
        if (i + 2 > lv.i_hi) return (at(i - 2) - 5 * at(i - 1) + 15 * at(i) + 5 * at(i + 1)) / 16;
        return (-at(i - 1) + 9 * at(i) + 9 * at(i + 1) - at(i + 2)) / 16;
      };
      auto rk4 = [&](double f, double s0, double sm, double s1, double h) {
        const double k1 = A * f + B * s0;
        const double k2 = A * (f + 0.5 * h * k1) + B * sm;
        const double k3 = A * (f + 0.5 * h * k2) + B * sm;
        const double k4 = A * (f + h * k3) + B * s1;
        return f + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
      };
      lv.f[idx(k, i0_)] = lv.seed[static_cast<size_t>(k)];
      for (int i = i0_; i < lv.i_hi; ++i)
        lv.f[idx(k, i + 1)] = rk4(lv.f[idx(k, i)], S[size_t(i)], smid(i), S[size_t(i + 1)], h_);
      for (int i = i0_; i > lv.i_lo; --i)
        lv.f[idx(k, i - 1)] = rk4(lv.f[idx(k, i)], S[size_t(i)], smid(i - 1), S[size_t(i - 1)], -h_);
    }
    levels_.push_back(std::move(lv));
  }
};

inline std::vector<CoeffField> reflected_coeffs(const ModelConfig& cfg, int j_max, const ReflectedDomain& dom,
                                                const TransportSettings& ts = {}) {
  auto grid = std::make_shared<const ReflectedGrid>(cfg, j_max, dom, ts);
  std::vector<CoeffField> out;
  const double zp = dom.z_prime;
  for (size_t l = 0; l < grid->levels().size(); ++l) {
    CoeffField c;
    c.kind = grid->levels()[l].kind;
    c.j = grid->levels()[l].j;
    c.provenance = Provenance::RayTransport;
    c.grid = grid;
    c.level = static_cast<int>(l);
    c.eval = [grid, l, zp](const PairSeparation& p) {
      require(std::abs(p.z_prime - zp) <= 1e-12 * (1 + zp), ErrorCode::Domain, "pair outside the transported z' slice");
      const double w = p.w();
      require(w > 0.0, ErrorCode::Domain, "domain touches z + z' = 0");
      return grid->value(static_cast<int>(l), p.sigma_minus / (w * w), std::log(w));
    };
    out.push_back(std::move(c));
  }
  return out;
}

// ---- 4D massless series

// d_j = 2 kappa sum_n A_n E_{j-n}: coefficient of sigma_-^j in (2 kappa/|tau|) e^{kappa(|tau| - w)}
inline double bell_coeffs_4d_massless(int j, double w, double kappa) {
  require(w > 0.0, ErrorCode::Domain, "bell series needs w > 0");
  require(j >= 0, ErrorCode::Domain, "negative level");
  std::vector<double> c(static_cast<size_t>(j + 1), 0.0), E(static_cast<size_t>(j + 1), 0.0);
  for (int m = 1; m <= j; ++m) c[size_t(m)] = kappa * std::pow(2.0, m) * gen_binomial(0.5, m) / std::pow(w, 2 * m - 1);
  for (int q = 0; q <= j; ++q) {
    std::vector<double> args;
    for (int i = 1; i <= q; ++i) args.push_back(factorial(i) * c[size_t(i)]);
    E[size_t(q)] = complete_bell(q, args) / factorial(q);
  }
  double s = 0.0;
  for (int n = 0; n <= j; ++n) {
    const double binom = factorial(2 * n) / (factorial(n) * factorial(n));
    const double A = (n % 2 ? -1.0 : 1.0) / std::pow(w, 2 * n + 1) * binom / std::pow(2.0, n);
    s += A * E[size_t(j - n)];
  }
  return 2 * kappa * s;
}

// printed v'_j relate to the series by a global sign: v'_j(printed) = -d_j
inline constexpr double kPrintedVPrimeSign = -1.0;

// Taylor coefficients of g(sigma_-) = (2 kappa/|tau|) e^{+-kappa(|tau| - w)}, |tau| = sqrt(w^2 + 2 sigma_-),
// from the Cauchy integral on a circle of radius w^2/4 (half the distance to the branch point)
inline std::vector<double> taylor_oracle_4d(double w, double kappa, int order,
                                            SmoothingDirection dir = SmoothingDirection::PaperLemma) {
  require(w > 0.0, ErrorCode::Domain, "taylor oracle needs w > 0");
  require(order >= 0 && order <= 6, ErrorCode::Domain, "taylor oracle order must be <= 6");
  const double r = 0.25 * w * w;
  require(r > 1e-150, ErrorCode::Domain, "stencil radius underflow");
  const double a = dir == SmoothingDirection::PaperLemma ? kappa : -kappa;
  const int N = 128;
  std::vector<double> out(static_cast<size_t>(order + 1), 0.0);
  for (int q = 0; q < N; ++q) {
    const double th = 2 * std::numbers::pi * q / N;
    const cplx zeta = std::polar(r, th);
    const cplx tau = std::sqrt(w * w + 2.0 * zeta);
    const cplx g = 2 * kappa / tau * std::exp(a * (tau - w));
    for (int k = 0; k <= order; ++k) out[size_t(k)] += (g * std::polar(1.0, -k * th)).real();
  }
  for (int k = 0; k <= order; ++k) out[size_t(k)] /= N * std::pow(r, k);
  return out;
}

inline std::vector<CoeffField> bell_fields_4d(double kappa, int j_max) {
  std::vector<CoeffField> out;
  CoeffField u0;
  u0.kind = CoeffKind::UPrime;
  u0.provenance = Provenance::ConstantAnsatz;
  u0.eval = [](const PairSeparation&) { return 1.0; };
  out.push_back(u0);
  for (int j = 0; j <= j_max; ++j) {
    CoeffField c;
    c.kind = CoeffKind::VPrime;
    c.j = j;
    c.provenance = Provenance::BellSeries;
    c.eval = [j, kappa](const PairSeparation& p) { return bell_coeffs_4d_massless(j, p.w(), kappa); };
    out.push_back(std::move(c));
  }
  return out;
}

// ---- transport residual for evaluator-backed fields

struct TransportCheck {
  double residual = 0.0;
  double seed_residual = 0.0;
};

inline TransportCheck verify_transport(const CoeffField& field, const CoeffField* pred, const ModelConfig& cfg,
                                       const ReflectedDomain& dom = {}) {
  TransportCheck out;
  const int d = cfg.d;
  if (!is_reflected(field.kind)) {
    auto f = [&](double s) { return field(pair_from_sigma(d, s)); };
    std::function<double(double)> g = [](double) { return 0.0; };
    if (pred) g = [&](double s) { return (*pred)(pair_from_sigma(d, s)); };
    out.residual = direct_transport_residual(cfg, field.kind, field.j, f, g);
    return out;
  }
  if (field.grid && (!pred || pred->grid == field.grid)) {
    auto [r, s] = field.grid->transport_residual(field.level);
    out.residual = r;
    out.seed_residual = s;
    return out;
  }
  // reduced-coordinate stencils on the evaluators
  const double zp = dom.z_prime, h = 1e-3, he = 1e-3;
  auto G = [&](const CoeffField& c, double e, double y) {
    const double w = std::exp(y);
    return c(pair_reduced(d, e * w * w, w, zp));
  };
  auto d1 = [](auto f, double x, double hh) { return (f(x - 2 * hh) - 8 * f(x - hh) + 8 * f(x + hh) - f(x + 2 * hh)) / (12 * hh); };
  auto d2 = [](auto f, double x, double hh) {
    return (-f(x - 2 * hh) + 16 * f(x - hh) - 30 * f(x) + 16 * f(x + hh) - f(x + 2 * hh)) / (12 * hh * hh);
  };
  auto P = [&](const CoeffField& c, double e, double y) {
    auto fe = [&](double ee) { return G(c, ee, y); };
    auto fy = [&](double yy) { return G(c, e, yy); };
    auto fey = [&](double yy) { return d1([&](double ee) { return G(c, ee, yy); }, e, he); };
    const double w = std::exp(y);
    const double box = -(2 * e + 4 * e * e) * d2(fe, e, he) + (2 + 4 * e) * d1(fey, y, h) +
                       (d - 4 - 6 * e) * d1(fe, e, he) - d2(fy, y, h) + d1(fy, y, h);
    return box / (w * w) + cfg.m_sq * G(c, e, y);
  };
  const auto tc = transport_constants(field.kind, field.j, d);
  const double y0 = std::log(zp), y1 = std::log(dom.w_max);
  for (int ie = -1; ie <= 1; ++ie) {
    const double e = dom.eta_center + ie * dom.eta_half_width;
    for (int iy = 0; iy <= 16; ++iy) {
      const double y = y0 + (y1 - y0) * iy / 16.0;
      double r = tc.a * d1([&](double yy) { return G(field, e, yy); }, y, h) + tc.b * G(field, e, y);
      if (pred) r += P(*pred, e, y);
      out.residual = std::max(out.residual, std::abs(r));
    }
  }
  return out;
}

// ---- parametrix assembly

// alpha in front of U/sigma^n (+ V ln(-sigma)) matching the vacuum's leading singularity
inline double parametrix_alpha(int d) {
  const double n = hadamard_n(d), pi = std::numbers::pi;
  if (d == 2) return -1.0 / (4 * pi);
  const double a = std::tgamma(n) / (4 * std::pow(pi, n + 1) * std::pow(2.0, n));
  return d % 2 == 0 && (d - 2) / 2 % 2 == 1 ? -a : a;
}

struct ParametrixSpec {
  ModelConfig cfg;
  int j_max = 2;
  double lambda = 1.0;
  std::vector<CoeffField> u, v, u_prime, v_prime;
  bool reflected = true;
  double alpha = 0.0;        // calibrated against the vacuum
  double alpha_derived = 0.0;
};

enum class ReflectedSource { Auto, Transport, Bell };

inline ParametrixSpec make_parametrix(const ModelConfig& cfg, int j_max, const ReflectedDomain& dom = {},
                                      ReflectedSource src = ReflectedSource::Auto, bool reflected = true,
                                      const TransportSettings& ts = {}) {
  require(j_max >= 0, ErrorCode::Domain, "j_max must be >= 0");
  ParametrixSpec s;
  s.cfg = cfg;
  s.j_max = j_max;
  s.lambda = cfg.lambda;
  s.reflected = reflected;
  auto dc = direct_coeffs(cfg, std::min(j_max, 4));
  s.u = dc.u;
  s.v = dc.v;
  if (reflected) {
    if (cfg.dirichlet) {
      for (auto f : s.u) {
        auto g = f.eval;
        f.kind = CoeffKind::UPrime;
        f.eval = [g](const PairSeparation& p) { return -g(p); };
        s.u_prime.push_back(f);
      }
      for (auto f : s.v) {
        auto g = f.eval;
        f.kind = CoeffKind::VPrime;
        f.eval = [g](const PairSeparation& p) { return -g(p); };
        s.v_prime.push_back(f);
      }
    } else {
      const bool bell = src == ReflectedSource::Bell ||
                        (src == ReflectedSource::Auto && cfg.d == 4 && cfg.m_sq == 0.0);
      if (bell) require(cfg.d == 4 && cfg.m_sq == 0.0, ErrorCode::Unsupported, "bell series needs d=4, m=0");
      auto fields = bell ? bell_fields_4d(cfg.kappa, j_max) : reflected_coeffs(cfg, j_max, dom, ts);
      for (auto& f : fields) (f.kind == CoeffKind::UPrime ? s.u_prime : s.v_prime).push_back(std::move(f));
    }
  }
  s.alpha_derived = parametrix_alpha(cfg.d);
  s.alpha = s.alpha_derived;
  return s;
}

namespace detail {

inline double series(const std::vector<CoeffField>& c, const PairSeparation& p, double x) {
  double s = 0.0, pw = 1.0;
  for (const auto& f : c) {
    s += f(p) * pw;
    pw *= x;
  }
  return s;
}

// shape of one branch without alpha: U/sigma_T^n + V ln(-sigma_T/lambda^2) (even), U (-sigma_T)^{-n} (odd)
inline cplx branch_shape(int d, double lambda, double U, double V, cplx sT) {
  const double n = hadamard_n(d);
  if (d % 2 == 1) return U * std::pow(-sT, -n);
  cplx s = V * std::log(-sT / (lambda * lambda));
  if (d >= 4) s += U / std::pow(sT, static_cast<int>(n));
  return s;
}

}  // namespace detail

struct ParametrixValue {
  cplx direct, reflected;
  cplx total() const { return direct + reflected; }
};

inline ParametrixValue assemble_parametrix_parts(const ParametrixSpec& s, const PairSeparation& p, double eps) {
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  const int d = s.cfg.d;
  ParametrixValue out;
  const cplx sT = mode_interval(p.sigma, p.dt, eps);
  out.direct = s.alpha * detail::branch_shape(d, s.lambda, detail::series(s.u, p, p.sigma), detail::series(s.v, p, p.sigma), sT);
  if (s.reflected) {
    require(p.w() > 0.0, ErrorCode::Domain, "parametrix needs z + z' > 0");
    const cplx sTm = mode_interval(p.sigma_minus, p.dt, eps);
    out.reflected = s.alpha * detail::branch_shape(d, s.lambda, detail::series(s.u_prime, p, p.sigma_minus),
                                                   detail::series(s.v_prime, p, p.sigma_minus), sTm);
  }
  return out;
}

inline cplx assemble_parametrix(const ParametrixSpec& s, const PairSeparation& p, double eps) {
  return assemble_parametrix_parts(s, p, eps).total();
}

// alpha = dW / d(shape) between two deep-interior near-coincident spacelike pairs; the difference
// removes the constant part of the smooth remainder
inline double calibrate_alpha(ParametrixSpec& s) {
  ModelConfig c = s.cfg;
  c.kappa = 0.0;
  const double eps = 1e-14;
  auto at = [&](double r) {
    const PairSeparation p = separation_from(c.d, 0.0, c.d > 2 ? r : 0.0, 50.0, c.d > 2 ? 50.0 : 50.0 - r);
    const cplx W = vacuum_two_point(c, p, eps, EvalMethod::Closed);
    const cplx sh = detail::branch_shape(c.d, s.lambda, detail::series(s.u, p, p.sigma),
                                         detail::series(s.v, p, p.sigma), mode_interval(p.sigma, p.dt, eps));
    return std::pair{W, sh};
  };
  const auto [w1, s1] = at(1e-5);
  const auto [w2, s2] = at(2e-5);
  s.alpha = ((w1 - w2) / (s1 - s2)).real();
  return s.alpha;
}

// local causal form: delta pieces structural, Theta pieces pointwise
struct LocalCausal {
  struct Delta {
    Support on;
    int order;
    double coeff;
  };
  std::vector<Delta> deltas;
  double theta_part = 0.0;
};

inline double beta_delta(int d, double alpha) {
  if (d % 2 == 1 || d == 2) return 0.0;
  const int n = (d - 2) / 2;
  return -2 * std::numbers::pi * alpha * ((n - 1) % 2 ? -1.0 : 1.0) / factorial(n - 1);
}

inline double beta_theta(int d, double alpha) {
  if (d % 2 == 0) return -2 * std::numbers::pi * alpha;
  return 2 * alpha * std::sin(hadamard_n(d) * std::numbers::pi);
}

inline LocalCausal assemble_local_causal(const ParametrixSpec& s, const PairSeparation& p) {
  const int d = s.cfg.d;
  LocalCausal out;
  const double sg = sgn(p.dt);
  if (sg == 0.0) return out;
  const double bd = beta_delta(d, s.alpha) * sg, bt = beta_theta(d, s.alpha) * sg;
  auto branch = [&](Support on, double x, const std::vector<CoeffField>& U, const std::vector<CoeffField>& V) {
    if (d % 2 == 0) {
      // sigma^a delta^{(k)}(sigma) = (-1)^a k!/(k-a)! delta^{(k-a)}(sigma)
      const int k = (d - 2) / 2 - 1;
      for (int a = 0; a < static_cast<int>(U.size()) && a <= k && bd != 0.0; ++a) {
        const double c = (a % 2 ? -1.0 : 1.0) * factorial(k) / factorial(k - a);
        out.deltas.push_back({on, k - a, bd * c * U[size_t(a)](p)});
      }
      if (x > 0.0) out.theta_part += bt * detail::series(V, p, x);
    } else if (x > 0.0) {
      out.theta_part += bt * detail::series(U, p, x) * std::pow(x, -hadamard_n(d));
    }
  };
  branch(Support::Sigma, p.sigma, s.u, s.v);
  if (s.reflected) branch(Support::SigmaMinus, p.sigma_minus, s.u_prime, s.v_prime);
  return out;
}

// ---- coefficient tables

struct CoeffRow {
  CoeffKind kind;
  int j;
  PairSeparation pair;
  double value;
};

inline std::vector<CoeffRow> coeff_table(const std::vector<CoeffField>& fields, const std::vector<PairSeparation>& pairs) {
  std::vector<CoeffRow> rows;
  for (const auto& f : fields)
    for (const auto& p : pairs) rows.push_back({f.kind, f.j, p, f(p)});
  return rows;
}

}  // namespace hmk
