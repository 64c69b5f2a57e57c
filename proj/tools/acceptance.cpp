// acceptance: one PASS/FAIL line per criterion, tolerances fixed here
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "hmk/diagnostics.hpp"

using namespace hmk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double rel(cplx a, cplx b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

ModelConfig model(int d, double m_sq, double kappa) {
  ModelConfig c;
  c.d = d;
  c.m_sq = m_sq;
  c.kappa = kappa;
  return c;
}

std::vector<PairSeparation> random_pairs(int d, int n, unsigned long long seed) {
  GridSpec g;
  g.n_pairs = n;
  g.seed = seed;
  auto v = stratified_pairs(d, g);
  v.resize(static_cast<size_t>(n));
  return v;
}

constexpr unsigned long long kSeed = 20240917ULL;

// kappa = m in d <= 3 leaves a zero mode with no ground state
bool infrared(const ModelConfig& c) { return c.d <= 3 && c.kappa > 0.0 && c.kappa * c.kappa == c.m_sq; }

// 1. Dirichlet zero at the wall, Neumann zero normal derivative, kappa = 0 Robin equals Neumann
Outcome images_exact() {
  constexpr double kDirichletTol = 1e-10, kNeumannTol = 1e-6, kRobinTol = 1e-6;
  double dir = 0.0, neu = 0.0, rob = 0.0;
  for (int d : {2, 3, 4})
    for (double m_sq : {0.0, 1.0}) {
      const ModelConfig c = model(d, m_sq, 0.0);
      const bool states = !(d == 2 && m_sq == 0.0);
      for (const auto& p0 : random_pairs(d, 20, kSeed + d)) {
        Point x = make_point(d, p0.dt, 0.0), xp = make_point(d, 0.0, p0.z_prime);
        for (size_t i = 0; i < p0.dx_perp.size(); ++i) x.x_perp[i] = p0.dx_perp[i];
        const PairSeparation wall = separation(x, xp);
        if (std::abs(wall.sigma) > 1e-3) {
          const double g = std::abs(image_eval(neumann(KernelId::Causal), c, wall, 1e-3));
          dir = std::max(dir, std::abs(image_eval(dirichlet(KernelId::Causal), c, wall, 1e-3)) / std::max(g, 1.0));
        }
        if (states) {
          const cplx w = image_eval(neumann(KernelId::Vacuum), c, wall, 1e-3);
          dir = std::max(dir, std::abs(image_eval(dirichlet(KernelId::Vacuum), c, wall, 1e-3)) / std::abs(w));
          // one-sided fourth-order derivative at z = 0 of the Neumann state
          const double h = 1e-3;
          auto at = [&](double z) {
            Point y = x;
            y.z = z;
            return image_eval(neumann(KernelId::Vacuum), c, separation(y, xp), 1e-3);
          };
          const cplx f0 = at(0), f1 = at(h), f2 = at(2 * h), f3 = at(3 * h), f4 = at(4 * h);
          const cplx der = (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12 * h);
          neu = std::max(neu, std::abs(der) / (std::abs(f0) + std::abs(f1 - f0) / h));
          // kappa = 0 Robin state by its mode sum against the closed Neumann images
          const cplx r = robin_two_point(c, p0, 1e-3, StateMethod::ModeSum);
          rob = std::max(rob, rel(r, image_eval(neumann(KernelId::Vacuum), c, p0, 1e-3), 1e-12));
        }
        if (std::abs(p0.sigma_minus) > 1e-3 && std::abs(p0.sigma) > 1e-3) {
          const double g = robin_causal(c, p0, 1e-3, RobinMethod::Convolution);
          rob = std::max(rob, rel(g, image_eval(neumann(KernelId::Causal), c, p0, 1e-3), 1e-12));
        }
      }
    }
  return {dir <= kDirichletTol && neu <= kNeumannTol && rob <= kRobinTol,
          "dirichlet " + fmt("%.3g", dir) + ", neumann d_z " + fmt("%.3g", neu) + ", kappa=0 vs neumann " + fmt("%.3g", rob)};
}

// 2. convolution tail against the 4D massless closed form, convention chosen by the mode sum
Outcome closed_form_4d() {
  constexpr double kTol = 1e-6;
  const ModelConfig c = model(4, 0.0, 1.0);
  GridSpec g;
  g.n_pairs = 24;
  g.seed = kSeed;
  std::vector<PairSeparation> probes;
  for (const auto& p : stratified_pairs(4, g))
    if (p.sigma > 0.0) probes.push_back(p);
  const auto adj = adjudicate_smoothing(c, probes, 4e-3);
  RobinOptions win;
  win.convention = adj.winner;
  RobinConvention lose = adj.winner;
  lose.dir = adj.winner.dir == SmoothingDirection::PaperLemma ? SmoothingDirection::DecayForward : SmoothingDirection::PaperLemma;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> ut(0.1, 4.0), ur(0.0, 2.0), uz(0.05, 1.5), us(0.0, 1.0);
  double worst = 0.0, loser = 0.0;
  int n = 0;
  while (n < 1000) {
    const double dt = (us(rng) < 0.5 ? -1.0 : 1.0) * ut(rng);
    const auto p = separation_from(4, dt, ur(rng), uz(rng), uz(rng));
    if (p.sigma_minus <= 1e-3 || p.sigma <= 1e-3) continue;
    ++n;
    const double tail = robin_causal(c, p, 1e-3, RobinMethod::Convolution, win) -
                        image_eval(neumann(KernelId::Causal), c, p, 1e-3).real();
    worst = std::max(worst, rel(tail, tail_4d_massless(p, 1.0, adj.winner), 1e-300));
    loser = std::max(loser, rel(tail_4d_massless(p, 1.0, lose), tail, 1e-300));
  }
  return {worst <= kTol && adj.winner_mismatch < adj.runner_up_mismatch,
          "winner " + adj.winner.label() + " max rel " + fmt("%.3g", worst) + " on " + std::to_string(n) +
              " pairs; losing direction mismatch " + fmt("%.3g", loser) + "; mode-sum mismatch winner " +
              fmt("%.3g", adj.winner_mismatch) + " runner-up " + fmt("%.3g", adj.runner_up_mismatch)};
}

// 3. doubly-spacelike commutator below ten times the timelike eps-floor
Outcome causal_support() {
  GridSpec g;
  g.n_pairs = 60;
  g.seed = kSeed;
  bool ok = true;
  double worst = 0.0;
  for (const Cell& cell : default_cells()) {
    const auto r = support_scan(cell.config(), g, 4e-3);
    ok = ok && r.pass;
    worst = std::max(worst, r.spacelike_max / (10 * r.floor));
  }
  return {ok, "9 cells, worst spacelike_max/(10 floor) " + fmt("%.3g", worst)};
}

// 4. coefficient seeds, massive constants, 4D massless reflected levels
Outcome recursion_coverage() {
  constexpr double kConstTol = 1e-8, kV0Tol = 1e-10, kTransportTol = 1e-6;
  const ModelConfig massive = model(4, 1.0, 1.0);
  const auto dc = direct_coeffs(massive, 1);
  const auto u0 = direct_transport_levels(massive, CoeffKind::U, 0);
  const auto v = direct_transport_levels(massive, CoeffKind::V, 1);
  double const_err = 0.0;
  for (double s : {-0.8, -0.3, 0.2, 0.7}) {
    const_err = std::max(const_err, std::abs(v[0](s) - (-0.5)));
    const_err = std::max(const_err, std::abs(v[1](s) - 0.125));
  }
  bool seeds = u0[0](0.3) == 1.0 && dc.u[0](pair_from_sigma(4, 0.3)) == 1.0;
  ReflectedDomain dom;
  dom.z_prime = 0.5;
  dom.w_max = 4.2;
  dom.eta_half_width = 0.05;
  const ModelConfig mless = model(4, 0.0, 1.0);
  const auto spec = make_parametrix(mless, 2, dom, ReflectedSource::Transport);
  for (const auto& f : spec.u_prime)
    if (f.j == 0) seeds = seeds && f(pair_reduced(4, 0.0, 1.0, 0.5)) == 1.0;
  double v0_err = 0.0, tr_err = 0.0, taylor_err = 0.0;
  for (double w = 0.5; w <= 4.0 + 1e-12; w += 0.25) {
    v0_err = std::max(v0_err, std::abs(kPrintedVPrimeSign * bell_coeffs_4d_massless(0, w, 1.0) - (-2.0 / w)));
    const auto taylor = taylor_oracle_4d(w, 1.0, 2);
    const auto p = pair_reduced(4, 0.0, w, 0.5);
    for (const auto& f : spec.v_prime) {
      const double bell = bell_coeffs_4d_massless(f.j, w, 1.0);
      taylor_err = std::max(taylor_err, std::abs(bell - taylor[size_t(f.j)]) / std::max(1.0, std::abs(bell)));
      tr_err = std::max(tr_err, std::abs(f(p) - bell) / std::max(1.0, std::abs(bell)));
    }
  }
  return {seeds && const_err <= kConstTol && v0_err <= kV0Tol && tr_err <= kTransportTol && taylor_err <= kTransportTol,
          std::string("seeds ") + (seeds ? "exact" : "WRONG") + ", v0/v1 " + fmt("%.3g", const_err) + ", printed v'0 " +
              fmt("%.3g", v0_err) + ", transport v'_j vs bell " + fmt("%.3g", tr_err) + ", bell vs taylor " +
              fmt("%.3g", taylor_err)};
}

// 5. Robin condition on the state at the wall
Outcome boundary_condition() {
  constexpr double kTol = 1e-3;
  bool ok = true;
  double worst = 0.0, worst_ratio = 0.0;
  int skipped = 0;
  for (int d : {3, 4})
    for (double m_sq : {0.0, 1.0})
      for (double kappa : {0.5, 1.0, 5.0}) {
        const ModelConfig c = model(d, m_sq, kappa);
        if (infrared(c)) {
          ++skipped;
          continue;
        }
        const Point xp = make_point(d, 0.0, 1.0);
        const auto a = check_bc(c, xp, 1e-2), b = check_bc(c, xp, 5e-3);
        ok = ok && a.residual < kTol && b.residual < a.residual;
        worst = std::max(worst, a.residual);
        worst_ratio = std::max(worst_ratio, b.residual / a.residual);
      }
  return {ok, "max residual " + fmt("%.3g", worst) + " at eps 1e-2, max ratio under halving " + fmt("%.3g", worst_ratio) +
                  ", " + std::to_string(skipped) + " infrared cell skipped"};
}

// 6. antisymmetric part is i G; two Feynman assemblies agree
Outcome ccr_feynman() {
  constexpr double kCcrTol = 1e-4, kFeynTol = 1e-5, kEps = 1e-7;
  double ccr = 0.0, feyn = 0.0;
  for (const Cell& cell : default_cells()) {
    const ModelConfig c = cell.config();
    if (c.d == 2 && c.m_sq == 0.0) continue;
    const auto pairs = random_pairs(c.d, 24, kSeed + 7);
    const auto r = check_ccr(c, pairs, kEps);
    ccr = std::max(ccr, r.residual / r.scale);
    double diff = 0.0, scale = 0.0;
    for (const auto& p : pairs) {
      const cplx a = feynman_kernel(c, p, kEps, FeynmanAssembly::Primary);
      diff = std::max(diff, std::abs(a - feynman_kernel(c, p, kEps, FeynmanAssembly::TimeOrdered)));
      scale = std::max(scale, std::abs(a));
    }
    feyn = std::max(feyn, diff / scale);
  }
  return {ccr <= kCcrTol && feyn <= kFeynTol, "ccr " + fmt("%.3g", ccr) + " of scale, feynman " + fmt("%.3g", feyn) + " of scale"};
}

// 7. positivity on interior Gaussians
Outcome positivity() {
  constexpr double kTol = -1e-8;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> uw(0.2, 0.5), uc(-1.0, 1.0), uz(0.0, 1.5);
  double worst = 1e300;
  for (double m_sq : {0.0, 1.0})
    for (double kappa : {0.0, 1.0, 5.0}) {
      std::vector<GaussianTest> tests;
      for (int i = 0; i < 20; ++i) {
        GaussianTest f;
        f.widths = {uw(rng), uw(rng), uw(rng), uw(rng)};
        f.center = make_point(4, uc(rng), 3 * f.widths.back() + uz(rng));
        for (auto& x : f.center.x_perp) x = uc(rng);
        tests.push_back(f);
      }
      const auto r = check_positivity(model(4, m_sq, kappa), tests);
      worst = std::min(worst, r.min_interior / r.scale);
    }
  return {worst >= kTol, "min Re omega(conj f, f)/scale " + fmt("%.3g", worst)};
}

// 8. singularity exponents, log flags, bounded remainder
Outcome hadamard_form() {
  constexpr double kExpTol = 0.05, kSlope = -0.1;
  double exp_err = 0.0, slope = 1e300;
  bool flags = true;
  int skipped = 0;
  for (int d : {3, 4})
    for (double m_sq : {0.0, 1.0})
      for (double kappa : {1.0, 5.0}) {
        const ModelConfig c = model(d, m_sq, kappa);
        if (infrared(c)) {
          ++skipped;
          continue;
        }
        for (Cone cone : {Cone::Direct, Cone::Reflected}) {
          const auto f = fit_singularity_exponent(KernelId::RobinState, cone, c);
          exp_err = std::max(exp_err, std::abs(f.exponent - hadamard_n(d)));
          flags = flags && f.has_log == expected_log(KernelId::RobinState, cone, c) && !(d % 2 == 1 && f.has_log);
          const auto spec = make_parametrix(c, 2, path_domain(d, cone, 1e-4, 1e-1));
          slope = std::min(slope, subtraction_diagnostic(spec, cone).log_slope);
        }
      }
  return {exp_err <= kExpTol && flags && slope >= kSlope,
          "max |exponent - (d-2)/2| " + fmt("%.3g", exp_err) + ", log flags " + (flags ? "as expected" : "WRONG") +
              ", min log-slope " + fmt("%.3g", slope) + ", " + std::to_string(skipped) + " infrared cell skipped"};
}

// 9. smeared d_t G at equal time recovers Gaussians after one calibration per dimension
Outcome equal_time() {
  constexpr double kTol = 1e-3;
  double worst = 0.0;
  std::string cal;
  for (int d : {2, 3, 4}) {
    for (auto [k, kappa] : {std::pair{KernelId::Causal, 0.0}, std::pair{KernelId::RobinCausal, 1.0}}) {
      const auto r = equal_time_check(model(d, 1.0, kappa), k);
      worst = std::max(worst, r.delta_residual);
      if (k == KernelId::Causal)
        cal += " d" + std::to_string(d) + ": " + fmt("%.6g", r.calibrated_prefactor) + " (x" +
               fmt("%.6g", r.calibrated_prefactor / r.printed_prefactor) + " printed)";
    }
  }
  return {worst <= kTol, "max relative error " + fmt("%.3g", worst) + ";" + cal};
}

// 10. the verify report resolves the three ambiguities and passes
Outcome adjudication() {
  const auto rep = run_verify_suite(SuiteSettings{});
  auto has = [&](const std::string& k) {
    for (const auto& [key, v] : rep.summary)
      if (key == k) return true;
    return false;
  };
  bool keys = true;
  for (const char* k : {"adjudication.smoothing_direction", "adjudication.smoothing_runner_up_mismatch",
                        "adjudication.mode_reflection", "adjudication.mode_reflection.PAPER_R_max_bc_residual",
                        "adjudication.lhat_sign", "adjudication.lhat_printed_max_error", "calibration.d2.equal_time_constant",
                        "calibration.d3.equal_time_constant", "calibration.d4.equal_time_constant"})
    keys = keys && has(k);
  int fails = 0;
  for (const auto& r : rep.rows) fails += r.gated && r.status == CheckStatus::Fail;
  return {keys && rep.all_pass(), std::string("adjudications ") + (keys ? "present" : "MISSING") + ", " +
                                      std::to_string(rep.rows.size()) + " rows, " + std::to_string(fails) + " gated failures"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"image-theory exactness", images_exact},
      {"4D massless closed form vs convolution", closed_form_4d},
      {"causal support", causal_support},
      {"recursion-relation coverage", recursion_coverage},
      {"boundary condition on states", boundary_condition},
      {"CCR and Feynman assembly", ccr_feynman},
      {"positivity", positivity},
      {"local Hadamard structure", hadamard_form},
      {"equal-time normalization", equal_time},
      {"adjudication completeness", adjudication},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
