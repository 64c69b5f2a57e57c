#pragma once

#include <string>

#include "hadamard_coeffs.hpp"
#include "images.hpp"
#include "kernel_id.hpp"
#include "robin_transform.hpp"
#include "states.hpp"

namespace hmk {

struct EvalRequest {
  KernelId kernel = KernelId::Causal;
  ModelConfig cfg{};
  double eps = 1e-3;
  std::string method;  // empty: the kernel's default
  RobinOptions robin{};
  int j_max = 2;  // parametrix depth
};

struct EvalResult {
  cplx value;
  std::string method;
};

// single-pair evaluation of any kernel except lkappa
inline EvalResult evaluate(const EvalRequest& r, const PairSeparation& p) {
  const ModelConfig& cfg = r.cfg;
  cfg.validate();
  require(r.eps > 0.0, ErrorCode::Usage, "eps must be positive");
  require(p.dim() == cfg.d, ErrorCode::Usage, "pair dimension differs from d");
  // default: closed forms and convolution off the cones, the eps-damped mode sum on them
  const bool on_direct = std::abs(p.sigma) <= 1e-8, on_reflected = std::abs(p.sigma_minus) <= 1e-8;
  auto eval_method = [&](bool singular_here) {
    if (r.method.empty()) return singular_here ? EvalMethod::ModeSum : EvalMethod::Closed;
    if (r.method == "closed") return EvalMethod::Closed;
    if (r.method == "modesum") return EvalMethod::ModeSum;
    throw Error(ErrorCode::Usage, "method for " + to_string(r.kernel) + " must be closed or modesum");
  };
  auto robin_method = [&] {
    if (r.method.empty()) return on_direct || on_reflected ? RobinMethod::ModeSum : RobinMethod::Convolution;
    return parse_robin_method(r.method);
  };
  auto state_method = [&] { return r.method.empty() ? StateMethod::ImagePlusSmooth : parse_state_method(r.method); };
  StateOptions so;
  so.reflection = r.robin.reflection;
  so.include_bound_state = r.robin.include_bound_state;
  so.quad = r.robin.quad;

  switch (r.kernel) {
    case KernelId::Causal:
    case KernelId::Retarded:
    case KernelId::Advanced:
    case KernelId::Vacuum:
    case KernelId::Feynman: {
      const bool causal = r.kernel != KernelId::Vacuum && r.kernel != KernelId::Feynman;
      const EvalMethod m = r.kernel == KernelId::Feynman ? EvalMethod::Closed : eval_method(causal && on_direct);
      return {whole_space_eval(r.kernel, cfg, p, r.eps, m, r.robin.quad), m == EvalMethod::Closed ? "closed" : "modesum"};
    }
    case KernelId::DirichletCausal:
    case KernelId::NeumannCausal:
    case KernelId::DirichletState:
    case KernelId::NeumannState: {
      const bool causal = r.kernel == KernelId::DirichletCausal || r.kernel == KernelId::NeumannCausal;
      const bool dir = r.kernel == KernelId::DirichletCausal || r.kernel == KernelId::DirichletState;
      const KernelId base = causal ? KernelId::Causal : KernelId::Vacuum;
      const EvalMethod m = eval_method(causal && (on_direct || on_reflected));
      return {image_eval(dir ? dirichlet(base) : neumann(base), cfg, p, r.eps, m, r.robin.quad),
              m == EvalMethod::Closed ? "closed" : "modesum"};
    }
    case KernelId::RobinCausal: {
      const RobinMethod m = robin_method();
      return {robin_causal(cfg, p, r.eps, m, r.robin), to_string(m)};
    }
    case KernelId::RobinRetarded:
    case KernelId::RobinAdvanced: {
      const RobinMethod m = robin_method();
      const auto v = r.kernel == KernelId::RobinRetarded ? robin_retarded(cfg, p, r.eps, m, r.robin)
                                                         : robin_advanced(cfg, p, r.eps, m, r.robin);
      return {v.value, std::string(to_string(m)) + (v.boundary_of_support ? "+equal_time" : "")};
    }
    case KernelId::RobinState: {
      const StateMethod m = state_method();
      return {robin_two_point(cfg, p, r.eps, m, so), to_string(m)};
    }
    case KernelId::RobinFeynman: {
      const StateMethod m = state_method();
      return {feynman_kernel(cfg, p, r.eps, FeynmanAssembly::Primary, m, so), to_string(m)};
    }
    case KernelId::Parametrix: {
      ReflectedDomain dom;
      dom.z_prime = p.z_prime;
      dom.w_max = std::max(dom.w_max, 1.25 * p.w());
      const double eta = p.w() > 0.0 ? p.sigma_minus / (p.w() * p.w()) : 0.0;
      dom.eta_center = eta;
      dom.eta_half_width = 0.1 + std::abs(eta) * 0.1;
      ReflectedSource src = ReflectedSource::Auto;
      if (r.method == "transport") src = ReflectedSource::Transport;
      else if (r.method == "bell") src = ReflectedSource::Bell;
      else require(r.method.empty() || r.method == "auto", ErrorCode::Usage, "parametrix method must be auto, transport or bell");
      auto spec = make_parametrix(cfg, r.j_max, dom, src);
      std::string label = "parametrix_j" + std::to_string(r.j_max);
      if (!spec.u_prime.empty() || !spec.v_prime.empty()) {
        const auto& f = spec.v_prime.empty() ? spec.u_prime.back() : spec.v_prime.back();
        label += std::string("_") + to_string(f.provenance);
      }
      return {assemble_parametrix(spec, p, r.eps), label};
    }
    case KernelId::Lkappa: throw Error(ErrorCode::Usage, "lkappa takes --z, not a pair");
  }
  throw Error(ErrorCode::Usage, "unknown kernel");
}

}  // namespace hmk
