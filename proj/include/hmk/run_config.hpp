#pragma once

#include <filesystem>
#include <string>

#include "diagnostics.hpp"
#include "io.hpp"

namespace hmk {

struct RunConfig {
  ModelConfig model{};
  SuiteSettings suite{};
  std::filesystem::path output_dir = "hmk_out";
  bool mode_sum_gate = true;
};

// "DIRICHLET" or a number
inline void apply_kappa(ModelConfig& cfg, const std::string& s) {
  if (s == "DIRICHLET" || s == "dirichlet" || s == "inf") {
    cfg.dirichlet = true;
    cfg.kappa = 0.0;
    return;
  }
  const auto v = io::parse_numbers(s);
  require(v.size() == 1, ErrorCode::Usage, "kappa needs one number or DIRICHLET");
  cfg.kappa = v[0];
  cfg.dirichlet = false;
}

inline RunConfig run_config_from(const io::FlatConfig& f) {
  RunConfig rc;
  ModelConfig& m = rc.model;
  m.d = static_cast<int>(f.integer("d", m.d));
  m.m_sq = f.real("m_sq", m.m_sq);
  if (f.has("kappa")) apply_kappa(m, f.str("kappa", ""));
  m.lambda = f.real("lambda", m.lambda);
  m.eps_default = f.real("eps_default", m.eps_default);
  m.validate();

  SuiteSettings& s = rc.suite;
  QuadratureSpec& q = s.robin.quad;
  q.k_max = f.real("quad.k_max", q.k_max);
  q.n_radial = static_cast<int>(f.integer("quad.n_radial", q.n_radial));
  q.n_depth = static_cast<int>(f.integer("quad.n_depth", q.n_depth));
  q.rel_tol = f.real("quad.rel_tol", q.rel_tol);
  require(q.k_max > 0.0 && q.n_radial >= 4 && q.n_depth >= 4 && q.rel_tol > 0.0, ErrorCode::Usage,
          "quadrature settings out of range");

  s.robin.convention.dir = parse_smoothing(f.str("smoothing_direction", to_string(s.robin.convention.dir)));
  const std::string sign = f.str("correction_sign", "+");
  require(sign == "+" || sign == "-", ErrorCode::Usage, "correction_sign must be + or -");
  s.robin.convention.correction_sign = sign == "+" ? 1 : -1;
  s.robin.reflection = parse_reflection(f.str("mode_reflection", to_string(s.robin.reflection)));
  s.robin.include_bound_state = f.boolean("include_bound_state", true);
  s.robin.richardson_levels = static_cast<int>(f.integer("richardson_levels", s.robin.richardson_levels));

  GridSpec& g = s.grid;
  const long long seed = f.integer("seed", static_cast<long long>(g.seed));
  require(seed >= 0, ErrorCode::Usage, "seed must be >= 0");
  g.seed = static_cast<unsigned long long>(seed);
  g.t_range = f.real("grid.t_range", g.t_range);
  g.rho_max = f.real("grid.rho_max", g.rho_max);
  g.z_min = f.real("grid.z_min", g.z_min);
  g.z_max = f.real("grid.z_max", g.z_max);
  g.cone_margin = f.real("grid.cone_margin", g.cone_margin);
  require(g.t_range > 0.0 && g.rho_max >= 0.0 && g.z_min > 0.0 && g.z_max > g.z_min && g.cone_margin > 0.0,
          ErrorCode::Usage, "grid settings out of range");

  if (f.has("cells")) s.cells = parse_cells(f.str("cells", ""));
  s.eps_support = f.real("eps_support", s.eps_support);
  s.eps_bc = f.real("eps_bc", s.eps_bc);
  s.eps_ccr = f.real("eps_ccr", s.eps_ccr);
  s.n_support_pairs = static_cast<int>(f.integer("n_support_pairs", s.n_support_pairs));
  s.n_ccr_pairs = static_cast<int>(f.integer("n_ccr_pairs", s.n_ccr_pairs));
  s.n_positivity = static_cast<int>(f.integer("n_positivity", s.n_positivity));
  s.j_max = static_cast<int>(f.integer("j_max", s.j_max));
  require(s.eps_support > 0.0 && s.eps_bc > 0.0 && s.eps_ccr > 0.0, ErrorCode::Usage, "eps values must be positive");
  require(s.n_support_pairs >= 3 && s.n_ccr_pairs >= 3 && s.n_positivity >= 1, ErrorCode::Usage, "probe counts too small");
  require(s.j_max >= 0 && s.j_max <= 4, ErrorCode::Usage, "j_max must be in [0, 4]");
  s.base.lambda = m.lambda;

  rc.mode_sum_gate = f.boolean("mode_sum_gate", true);
  s.adjudicate = rc.mode_sum_gate;
  rc.output_dir = f.str("output_dir", rc.output_dir.string());

  const auto extra = f.unused();
  require(extra.empty(), ErrorCode::Usage, "unknown config key '" + (extra.empty() ? "" : extra.front()) + "'");
  return rc;
}

// the default configuration as a config file
inline std::string default_config_text() {
  const RunConfig rc;
  const SuiteSettings& s = rc.suite;
  std::string cells;
  for (const auto& c : s.cells)
    cells += (cells.empty() ? "" : ", ") + std::to_string(c.d) + ":" + io::num(c.m_sq) + ":" +
             (c.dirichlet ? std::string("DIRICHLET") : io::num(c.kappa));
  std::string t;
  t += "# model used by eval/scan defaults\n";
  t += "d = " + std::to_string(rc.model.d) + "\n";
  t += "m_sq = " + io::num(rc.model.m_sq) + "\n";
  t += "kappa = " + io::num(rc.model.kappa) + "\n";
  t += "lambda = " + io::num(rc.model.lambda) + "\n";
  t += "eps_default = " + io::num(rc.model.eps_default) + "\n\n";
  t += "smoothing_direction = " + std::string(to_string(s.robin.convention.dir)) + "\n";
  t += "correction_sign = +\n";
  t += "mode_reflection = " + std::string(to_string(s.robin.reflection)) + "\n";
  t += "mode_sum_gate = true\n";
  t += "include_bound_state = true\n";
  t += "richardson_levels = " + std::to_string(s.robin.richardson_levels) + "\n\n";
  t += "seed = " + std::to_string(s.grid.seed) + "\n";
  t += "cells = " + cells + "\n";
  t += "eps_support = " + io::num(s.eps_support) + "\n";
  t += "eps_bc = " + io::num(s.eps_bc) + "\n";
  t += "eps_ccr = " + io::num(s.eps_ccr) + "\n";
  t += "n_support_pairs = " + std::to_string(s.n_support_pairs) + "\n";
  t += "n_ccr_pairs = " + std::to_string(s.n_ccr_pairs) + "\n";
  t += "n_positivity = " + std::to_string(s.n_positivity) + "\n";
  t += "j_max = " + std::to_string(s.j_max) + "\n\n";
  t += "grid.t_range = " + io::num(s.grid.t_range) + "\n";
  t += "grid.rho_max = " + io::num(s.grid.rho_max) + "\n";
  t += "grid.z_min = " + io::num(s.grid.z_min) + "\n";
  t += "grid.z_max = " + io::num(s.grid.z_max) + "\n";
  t += "grid.cone_margin = " + io::num(s.grid.cone_margin) + "\n\n";
  t += "quad.k_max = " + io::num(s.robin.quad.k_max) + "\n";
  t += "quad.n_radial = " + std::to_string(s.robin.quad.n_radial) + "\n";
  t += "quad.n_depth = " + std::to_string(s.robin.quad.n_depth) + "\n";
  t += "quad.rel_tol = " + io::num(s.robin.quad.rel_tol) + "\n\n";
  t += "output_dir = " + rc.output_dir.string() + "\n";
  return t;
}

}  // namespace hmk
