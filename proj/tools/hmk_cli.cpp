// hmk: evaluate half-space Klein-Gordon kernels, export Hadamard coefficients, run the verification suite
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hmk/evaluate.hpp"
#include "hmk/run_config.hpp"

using namespace hmk;

namespace {

enum Exit { kOk = 0, kCheckFail = 1, kUsage = 2, kNonConvergence = 3 };

int exit_for(const Error& e) { return e.code() == ErrorCode::NonConvergence ? kNonConvergence : kUsage; }

struct ModelArgs {
  std::string config;
  int d = 4;
  double m = 0.0, m_sq = 0.0;
  std::string kappa;
  double eps = 0.0;
  std::string smoothing, reflection;
  CLI::Option *d_opt = nullptr, *m_opt = nullptr, *msq_opt = nullptr, *kappa_opt = nullptr, *eps_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "flat key = value config file")->check(CLI::ExistingFile);
    d_opt = app->add_option("--d", d, "spacetime dimension");
    m_opt = app->add_option("--m", m, "mass");
    msq_opt = app->add_option("--m-sq", m_sq, "mass squared")->excludes(m_opt);
    kappa_opt = app->add_option("--kappa", kappa, "Robin parameter, or DIRICHLET");
    eps_opt = app->add_option("--eps", eps, "regulator");
    app->add_option("--smoothing", smoothing, "PAPER_LEMMA or DECAY_FORWARD");
    app->add_option("--reflection", reflection, "DERIVED_R or PAPER_R");
  }

  bool kappa_given() const {
    return kappa_opt->count() > 0 || (!config.empty() && io::FlatConfig::load(config).has("kappa"));
  }

  RunConfig resolve() const {
    RunConfig rc = config.empty() ? RunConfig{} : run_config_from(io::FlatConfig::load(config));
    ModelConfig& c = rc.model;
    if (d_opt->count()) c.d = d;
    if (m_opt->count()) {
      require(m >= 0.0, ErrorCode::Usage, "mass must be >= 0");
      c.m_sq = m * m;
    }
    if (msq_opt->count()) c.m_sq = m_sq;
    if (kappa_opt->count()) apply_kappa(c, kappa);
    if (eps_opt->count()) c.eps_default = eps;
    if (!smoothing.empty()) rc.suite.robin.convention.dir = parse_smoothing(smoothing);
    if (!reflection.empty()) rc.suite.robin.reflection = parse_reflection(reflection);
    c.validate();
    return rc;
  }
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) std::cout << text;
  else io::write_atomic(out_path, text);
}

std::string kappa_cell(const ModelConfig& c) { return c.dirichlet ? "DIRICHLET" : io::num(c.kappa); }

std::vector<std::string> pair_columns(int d) {
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= d - 2; ++i) h.push_back("x" + std::to_string(i));
  h.push_back("z");
  h.push_back("t_p");
  for (int i = 1; i <= d - 2; ++i) h.push_back("x" + std::to_string(i) + "_p");
  h.push_back("z_p");
  return h;
}

void push_points(std::vector<std::string>& row, const Point& x, const Point& xp) {
  for (const Point* q : {&x, &xp}) {
    row.push_back(io::num(q->t));
    for (double v : q->x_perp) row.push_back(io::num(v));
    row.push_back(io::num(q->z));
  }
}

std::pair<Point, Point> points_of(const PairSeparation& p) {
  Point x = make_point(p.dim(), p.dt, p.z), xp = make_point(p.dim(), 0.0, p.z_prime);
  for (size_t i = 0; i < p.dx_perp.size(); ++i) x.x_perp[i] = p.dx_perp[i];
  return {x, xp};
}

std::string eval_header(int d, bool with_s = false) {
  std::vector<std::string> h;
  if (with_s) h.push_back("s");
  for (const char* c : {"d", "m_sq", "kappa", "eps"}) h.push_back(c);
  for (auto& c : pair_columns(d)) h.push_back(c);
  for (const char* c : {"sigma", "sigma_minus", "re_value", "im_value", "kernel_id", "method"}) h.push_back(c);
  return io::csv_line(h);
}

std::string eval_row(const ModelConfig& c, double eps, const Point& x, const Point& xp, const PairSeparation& p,
                     const EvalResult& r, KernelId k, const std::string& s_cell = "") {
  std::vector<std::string> row;
  if (!s_cell.empty()) row.push_back(s_cell);
  row.insert(row.end(), {std::to_string(c.d), io::num(c.m_sq), kappa_cell(c), io::num(eps)});
  push_points(row, x, xp);
  row.insert(row.end(), {io::num(p.sigma), io::num(p.sigma_minus), io::num(r.value.real()), io::num(r.value.imag()),
                         to_string(k), r.method});
  return io::csv_line(row);
}

// ---- eval

struct EvalArgs {
  ModelArgs model;
  std::string kernel, method, out, t_grid;
  std::vector<std::string> pairs;
  double z = 0.0;
  int j_max = 2;
  CLI::Option* z_opt = nullptr;
};

int cmd_eval(const EvalArgs& a, CLI::App* sub) {
  const KernelId k = parse_kernel(a.kernel);
  if (is_robin(k) && !a.model.kappa_given()) {
    std::cerr << "error: kernel " << a.kernel << " needs --kappa\n\n" << sub->help();
    return kUsage;
  }
  const RunConfig rc = a.model.resolve();
  const ModelConfig& c = rc.model;
  if (k == KernelId::Lkappa) {
    require(a.z_opt->count() > 0, ErrorCode::Usage, "lkappa needs --z");
    require(!c.dirichlet, ErrorCode::Usage, "lkappa needs a finite kappa");
    std::string text = io::csv_line({"kappa", "z", "re_value", "im_value", "kernel_id", "method"});
    text += io::csv_line({io::num(c.kappa), io::num(a.z), io::num(lkappa(a.z, c.kappa)), io::num(0.0), "lkappa", "closed"});
    emit(a.out, text);
    return kOk;
  }
  require(!a.pairs.empty(), ErrorCode::Usage, "eval needs at least one --pair");
  EvalRequest req;
  req.kernel = k;
  req.cfg = c;
  req.eps = c.eps_default;
  req.method = a.method;
  req.robin = rc.suite.robin;
  req.j_max = a.j_max;
  std::string text = eval_header(c.d);
  for (const auto& s : a.pairs) {
    auto [x, xp] = io::parse_pair(s, c.d);
    std::vector<double> ts{x.t};
    if (!a.t_grid.empty()) ts = io::parse_range(a.t_grid);
    for (double t : ts) {
      x.t = t;
      const auto p = separation(x, xp);
      text += eval_row(c, req.eps, x, xp, p, evaluate(req, p), k);
    }
  }
  emit(a.out, text);
  return kOk;
}

// ---- coeffs

struct CoeffArgs {
  ModelArgs model;
  std::string kind, w_grid = "0.5:4:0.25", sigma_grid = "-1:1:0.25", source = "auto", out;
  int j_max = 2;
  double z_prime = 0.5, eta = 0.0;
};

int cmd_coeffs(const CoeffArgs& a) {
  const RunConfig rc = a.model.resolve();
  const ModelConfig& c = rc.model;
  const CoeffKind kind = parse_coeff_kind(a.kind);
  require(a.j_max >= 0, ErrorCode::Usage, "jmax must be >= 0");
  require(a.j_max <= 4, ErrorCode::Usage, "jmax " + std::to_string(a.j_max) + " exceeds supported depth (4)");
  std::vector<CoeffField> fields;
  std::vector<PairSeparation> pairs;
  if (is_reflected(kind)) {
    require(a.z_prime > 0.0, ErrorCode::Usage, "z' must be > 0");
    const auto ws = io::parse_range(a.w_grid);
    require(ws.front() >= a.z_prime, ErrorCode::Usage, "w grid starts below the boundary crossing w = z'");
    ReflectedDomain dom;
    dom.z_prime = a.z_prime;
    dom.w_max = std::max(ws.back() * 1.05, a.z_prime * 1.05);
    dom.eta_center = a.eta;
    dom.eta_half_width = 0.05;
    ReflectedSource src = ReflectedSource::Auto;
    if (a.source == "transport") src = ReflectedSource::Transport;
    else if (a.source == "bell") src = ReflectedSource::Bell;
    else require(a.source == "auto", ErrorCode::Usage, "source must be auto, transport or bell");
    const auto spec = make_parametrix(c, a.j_max, dom, src);
    fields = kind == CoeffKind::UPrime ? spec.u_prime : spec.v_prime;
    for (double w : ws) pairs.push_back(pair_reduced(c.d, a.eta * w * w, w, a.z_prime));
  } else {
    const auto dc = direct_coeffs(c, a.j_max);
    fields = kind == CoeffKind::U ? dc.u : dc.v;
    for (double s : io::parse_range(a.sigma_grid)) pairs.push_back(pair_from_sigma(c.d, s));
  }
  std::vector<std::string> h{"kind", "j"};
  for (auto& col : pair_columns(c.d)) h.push_back(col);
  h.push_back("value");
  h.push_back("provenance");
  std::string text = io::csv_line(h);
  for (const auto& f : fields) {
    if (f.j > a.j_max) continue;
    for (const auto& p : pairs) {
      std::vector<std::string> row{to_string(f.kind), std::to_string(f.j)};
      auto [x, xp] = points_of(p);
      push_points(row, x, xp);
      row.push_back(io::num(f(p)));
      row.push_back(to_string(f.provenance));
      text += io::csv_line(row);
    }
  }
  emit(a.out, text);
  return kOk;
}

// ---- scan

struct ScanArgs {
  ModelArgs model;
  std::string what, cone = "reflected", kernel = "robin-state", method, out;
  int n_pairs = 90, n = 13;
  long long seed = -1;
  double s_lo = 1e-4, s_hi = 1e-1, z0 = 1.0;
};

int cmd_scan(const ScanArgs& a) {
  const RunConfig rc = a.model.resolve();
  const ModelConfig& c = rc.model;
  const double eps = c.eps_default;
  if (a.what == "support") {
    GridSpec g = rc.suite.grid;
    g.n_pairs = a.n_pairs;
    if (a.seed >= 0) g.seed = static_cast<unsigned long long>(a.seed);
    const auto rep = support_scan(c, g, eps, rc.suite.robin);
    std::vector<std::string> h{"d", "m_sq", "kappa", "eps", "seed"};
    for (auto& col : pair_columns(c.d)) h.push_back(col);
    for (const char* col : {"sigma", "sigma_minus", "stratum", "value"}) h.push_back(col);
    std::string text = io::csv_line(h);
    for (const auto& [p, v] : rep.rows) {
      std::vector<std::string> row{std::to_string(c.d), io::num(c.m_sq), kappa_cell(c), io::num(eps), std::to_string(g.seed)};
      auto [x, xp] = points_of(p);
      push_points(row, x, xp);
      row.insert(row.end(), {io::num(p.sigma), io::num(p.sigma_minus), to_string(stratum_of(p)), io::num(v)});
      text += io::csv_line(row);
    }
    emit(a.out, text);
    std::fprintf(stderr, "spacelike_max = %.17g\nfloor = %.17g\nresult = %s\n", rep.spacelike_max, rep.floor,
                 rep.pass ? "PASS" : "FAIL");
    return rep.pass ? kOk : kCheckFail;
  }
  require(a.what == "cone", ErrorCode::Usage, "scan target must be support or cone");
  require(a.cone == "direct" || a.cone == "reflected", ErrorCode::Usage, "cone must be direct or reflected");
  require(a.s_lo > 0.0 && a.s_hi > a.s_lo && a.n >= 2, ErrorCode::Usage, "need 0 < s-lo < s-hi and n >= 2");
  const Cone cone = a.cone == "direct" ? Cone::Direct : Cone::Reflected;
  EvalRequest req;
  req.kernel = parse_kernel(a.kernel);
  require(req.kernel != KernelId::Lkappa, ErrorCode::Usage, "lkappa has no pair argument");
  req.cfg = c;
  req.eps = eps;
  req.method = a.method;
  req.robin = rc.suite.robin;
  std::string text = eval_header(c.d, true);
  for (double s : log_grid(a.s_lo, a.s_hi, a.n)) {
    const auto p = cone_path_pair(c.d, cone, s, a.z0);
    auto [x, xp] = points_of(p);
    text += eval_row(c, eps, x, xp, p, evaluate(req, p), req.kernel, io::num(s));
  }
  emit(a.out, text);
  return kOk;
}

// ---- verify and report

int cmd_verify(const std::string& config, const std::string& out_dir, bool print_default) {
  if (print_default) {
    std::cout << default_config_text();
    return kOk;
  }
  RunConfig rc = config.empty() ? RunConfig{} : run_config_from(io::FlatConfig::load(config));
  if (!out_dir.empty()) rc.output_dir = out_dir;
  const auto rep = run_verify_suite(rc.suite);
  write_verify_report(rep, rc.output_dir);
  std::cout << rep.summary_text();
  for (const auto& r : rep.rows)
    if (r.gated && r.status == CheckStatus::Fail)
      std::cout << "FAIL " << r.check << " [" << r.cell << "] value=" << io::num(r.value)
                << " threshold=" << io::num(r.threshold) << (r.note.empty() ? "" : " " + r.note) << "\n";
  std::cout << "report written to " << rc.output_dir.string() << "\n";
  return rep.all_pass() ? kOk : kCheckFail;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path summary = fs::path(dir) / "verify_summary.txt", csv = fs::path(dir) / "verify_report.csv";
  require(fs::exists(summary) && fs::exists(csv), ErrorCode::Usage, "no verify report in " + dir);
  const auto kv = io::FlatConfig::load(summary);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::array<int, 3>> counts;  // check -> pass, fail, skipped
  while (std::getline(in, line)) {
    // check_id is the first cell and never quoted; status sits in the seventh column
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      else if (ch == ',' && !quoted) cells.push_back(cell), cell.clear();
      else cell += ch;
    }
    cells.push_back(cell);
    require(cells.size() >= 8, ErrorCode::Usage, "malformed report row: " + line);
    // evidence rows are listed with a trailing '*' and do not affect the result
    auto& c = counts[cells[0] + (cells[7] == "yes" ? "" : "*")];
    ++c[cells[6] == "PASS" ? 0 : cells[6] == "FAIL" ? 1 : 2];
  }
  std::printf("%-36s %6s %6s %8s\n", "check", "pass", "fail", "skipped");
  for (const auto& [k, c] : counts) std::printf("%-36s %6d %6d %8d\n", k.c_str(), c[0], c[1], c[2]);
  std::printf("(* reported only, not gated)\n");
  for (const char* key : {"seed", "smoothing_direction", "mode_reflection", "adjudication.smoothing_direction",
                          "adjudication.mode_reflection", "adjudication.lhat_sign", "result"})
    if (kv.has(key)) std::printf("%s = %s\n", key, kv.str(key, "").c_str());
  return kv.str("result", "FAIL") == "PASS" ? kOk : kCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon kernels on half-Minkowski space with Robin boundary"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "evaluate one kernel at one or more point pairs");
  ev.model.attach(eval);
  eval->add_option("--kernel", ev.kernel, "kernel id (causal, robin-causal, robin-state, lkappa, ...)")->required();
  eval->add_option("--pair", ev.pairs, "\"t,x..,z;t',x'..,z'\" (repeatable)");
  eval->add_option("--t-grid", ev.t_grid, "scan t of the first point over lo:hi:step");
  eval->add_option("--method", ev.method, "closed, modesum, convolution, image_plus_smooth, transport, bell");
  ev.z_opt = eval->add_option("--z", ev.z, "depth for lkappa");
  eval->add_option("--jmax", ev.j_max, "parametrix depth");
  eval->add_option("--out", ev.out, "CSV file (default stdout)");

  CoeffArgs co;
  auto* coeffs = app.add_subcommand("coeffs", "export Hadamard coefficient tables");
  co.model.attach(coeffs);
  coeffs->add_option("--kind", co.kind, "u, v, uprime, vprime")->required();
  coeffs->add_option("--jmax", co.j_max, "highest level");
  coeffs->add_option("--w-grid", co.w_grid, "z + z' grid lo:hi:step (reflected kinds)");
  coeffs->add_option("--sigma-grid", co.sigma_grid, "sigma grid lo:hi:step (direct kinds)");
  coeffs->add_option("--zp", co.z_prime, "source depth z' (reflected kinds)");
  coeffs->add_option("--eta", co.eta, "sigma_- / w^2 along the table (reflected kinds)");
  coeffs->add_option("--source", co.source, "auto, transport, bell");
  coeffs->add_option("--out", co.out, "CSV file (default stdout)");

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "support scan over seeded pairs, or a cone-approach path");
  sc.model.attach(scan);
  scan->add_option("target", sc.what, "support or cone")->required();
  scan->add_option("--n-pairs", sc.n_pairs, "support: pairs over the three strata");
  scan->add_option("--seed", sc.seed, "support: probe seed (default from config)");
  scan->add_option("--cone", sc.cone, "cone: direct or reflected");
  scan->add_option("--kernel", sc.kernel, "cone: kernel id");
  scan->add_option("--method", sc.method, "cone: evaluation method");
  scan->add_option("--s-lo", sc.s_lo, "cone: smallest interval");
  scan->add_option("--s-hi", sc.s_hi, "cone: largest interval");
  scan->add_option("--n", sc.n, "cone: log-spaced samples");
  scan->add_option("--z0", sc.z0, "cone: depth of x'");
  scan->add_option("--out", sc.out, "CSV file (default stdout)");

  std::string v_config, v_out;
  bool v_default = false;
  auto* verify = app.add_subcommand("verify", "run the verification suite and write the report");
  verify->add_option("config", v_config, "config file (defaults when omitted)")->check(CLI::ExistingFile);
  verify->add_option("--out", v_out, "report directory (overrides output_dir)");
  verify->add_flag("--print-default-config", v_default, "print the default config and exit");

  std::string r_dir = "hmk_out";
  auto* report = app.add_subcommand("report", "summarize a written verify report");
  report->add_option("dir", r_dir, "report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  try {
    if (*eval) return cmd_eval(ev, eval);
    if (*coeffs) return cmd_coeffs(co);
    if (*scan) return cmd_scan(sc);
    if (*verify) return cmd_verify(v_config, v_out, v_default);
    if (*report) return cmd_report(r_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
