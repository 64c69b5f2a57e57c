#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "error.hpp"

namespace hmk {

using cplx = std::complex<double>;

struct ModelConfig {
  int d = 4;
  double m_sq = 0.0;
  double kappa = 0.0;
  bool dirichlet = false;  // kappa -> infinity sentinel
  double lambda = 1.0;     // length scale inside logs
  double eps_default = 1e-3;
  double eps_time_factor = 1.0;

  double mass() const { return std::sqrt(m_sq); }

  void validate() const {
    require(d >= 2, ErrorCode::Usage, "d must be >= 2");
    require(m_sq >= 0.0, ErrorCode::Usage, "m_sq must be >= 0");
    require(dirichlet || kappa >= 0.0, ErrorCode::Usage, "kappa must be >= 0 or DIRICHLET");
    require(lambda > 0.0, ErrorCode::Usage, "lambda must be > 0");
    require(eps_default > 0.0, ErrorCode::Usage, "eps_default must be > 0");
  }

  // states need a vacuum: massless d=2 has none
  void validate_state() const {
    validate();
    require(!(d == 2 && m_sq == 0.0), ErrorCode::Infrared, "no vacuum for massless d=2");
  }
};

struct Point {
  double t = 0.0;
  std::vector<double> x_perp;  // length d-2
  double z = 0.0;
  bool image = false;  // true for mirror points carrying z < 0

  Point() = default;
  Point(double t_, std::vector<double> xp, double z_) : t(t_), x_perp(std::move(xp)), z(z_) {}

  int dim() const { return static_cast<int>(x_perp.size()) + 2; }
};

inline Point make_point(int d, double t, double z) {
  return Point(t, std::vector<double>(static_cast<size_t>(d - 2), 0.0), z);
}

inline Point reflect(const Point& x) {
  Point r = x;
  r.z = -x.z;
  r.image = !x.image;
  return r;
}

struct PairSeparation {
  double dt = 0.0;
  std::vector<double> dx_perp;
  double z = 0.0, z_prime = 0.0;
  double sigma = 0.0;
  double sigma_minus = 0.0;
  double tau_sq = 0.0;
  double t_sum = 0.0;  // t + t', needed only by non-stationary (unstable-band) states

  double rho() const {
    double s = 0.0;
    for (double v : dx_perp) s += v * v;
    return std::sqrt(s);
  }
  double w() const { return z + z_prime; }
  double dz() const { return z - z_prime; }
  int dim() const { return static_cast<int>(dx_perp.size()) + 2; }

  // the pair with arguments exchanged
  PairSeparation swapped() const {
    PairSeparation p = *this;
    p.dt = -dt;
    for (double& v : p.dx_perp) v = -v;
    std::swap(p.z, p.z_prime);
    return p;
  }
};

inline PairSeparation separation(const Point& x, const Point& xp) {
  require(x.x_perp.size() == xp.x_perp.size(), ErrorCode::Domain, "points of different dimension");
  PairSeparation p;
  p.dt = x.t - xp.t;
  p.t_sum = x.t + xp.t;
  p.dx_perp.resize(x.x_perp.size());
  double perp = 0.0;
  for (size_t i = 0; i < x.x_perp.size(); ++i) {
    p.dx_perp[i] = x.x_perp[i] - xp.x_perp[i];
    perp += p.dx_perp[i] * p.dx_perp[i];
  }
  p.z = x.z;
  p.z_prime = xp.z;
  p.tau_sq = p.dt * p.dt - perp;
  const double dz = x.z - xp.z, w = x.z + xp.z;
  p.sigma = 0.5 * (p.tau_sq - dz * dz);
  p.sigma_minus = 0.5 * (p.tau_sq - w * w);
  return p;
}

// pair from (dt, rho, z, z') with the transverse offset along the first axis
inline PairSeparation separation_from(int d, double dt, double rho, double z, double zp) {
  Point x = make_point(d, dt, z), xp = make_point(d, 0.0, zp);
  if (d > 2) x.x_perp[0] = rho;
  return separation(x, xp);
}

inline double synge(const Point& x, const Point& xp) { return separation(x, xp).sigma; }

inline double synge_reflected(const Point& x, const Point& xp) {
  return separation(x, xp).sigma_minus;
}

enum class IntervalKind { Direct, Reflected, Feynman };

// sigma + i eps f dt + eps^2 (direct/reflected); sigma + i eps (Feynman)
inline cplx regularized_interval(const PairSeparation& p, double eps, IntervalKind which,
                                 double time_factor = 1.0, bool reflected_feynman = false) {
  require(eps > 0.0, ErrorCode::Domain, "eps must be positive");
  switch (which) {
    case IntervalKind::Direct: return {p.sigma + eps * eps, eps * time_factor * p.dt};
    case IntervalKind::Reflected: return {p.sigma_minus + eps * eps, eps * time_factor * p.dt};
    case IntervalKind::Feynman: return {reflected_feynman ? p.sigma_minus : p.sigma, eps};
  }
  return {};
}

// interval seen by the damped modes: T = dt + i eps, sigma_T = (T^2 - r^2)/2
inline cplx mode_interval(double sigma, double dt, double eps) {
  return {sigma - 0.5 * eps * eps, eps * dt};
}

struct CoincidenceReport {
  double max_hessian_dev = 0.0;
  double trace = 0.0;
  double trace_dev = 0.0;
  double euler_dev = 0.0;  // |sigma^mu sigma_mu - 2 sigma| on a probe point
};

// finite-difference Hessian of sigma(x, x') in x at x = x'
inline CoincidenceReport coincidence_limit_check(int d, double h) {
  require(h > 0.0, ErrorCode::Domain, "stencil_h must be positive");
  require(d >= 2, ErrorCode::Domain, "d must be >= 2");
  const Point base = make_point(d, 0.3, 1.1);
  auto coords = [&](const Point& p) {
    std::vector<double> c{p.t};
    c.insert(c.end(), p.x_perp.begin(), p.x_perp.end());
    c.push_back(p.z);
    return c;
  };
  auto from = [&](const std::vector<double>& c) {
    Point p = make_point(d, c[0], c.back());
    for (int i = 0; i < d - 2; ++i) p.x_perp[static_cast<size_t>(i)] = c[static_cast<size_t>(i + 1)];
    return p;
  };
  const auto c0 = coords(base);
  auto sig = [&](std::vector<double> c) { return synge(from(c), base); };
  CoincidenceReport r;
  double trace = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      auto c = c0;
      auto at = [&](double sa, double sb) {
        auto q = c;
        q[static_cast<size_t>(a)] += sa * h;
        q[static_cast<size_t>(b)] += sb * h;
        return sig(q);
      };
      const double hess = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
      const double eta = a != b ? 0.0 : (a == 0 ? 1.0 : -1.0);
      r.max_hessian_dev = std::max(r.max_hessian_dev, std::abs(hess - eta));
      if (a == b) trace += eta * hess;  // sigma^mu_mu = eta^{mu mu} sigma_{mu mu}
    }
  }
  r.trace = trace;
  r.trace_dev = std::abs(trace - d);
  // Euler identity on a generic point
  Point x = from(c0);
  x.t += 0.7;
  x.z += 0.2;
  if (d > 2) x.x_perp[0] += 0.4;
  auto cx = coords(x);
  double contr = 0.0;
  for (int a = 0; a < d; ++a) {
    auto p = cx, m = cx;
    p[static_cast<size_t>(a)] += h;
    m[static_cast<size_t>(a)] -= h;
    const double g = (sig(p) - sig(m)) / (2 * h);
    contr += (a == 0 ? 1.0 : -1.0) * g * g;
  }
  r.euler_dev = std::abs(contr - 2 * synge(x, base));
  return r;
}

}  // namespace hmk
