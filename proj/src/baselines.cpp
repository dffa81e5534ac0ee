#include "bnqn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bnqn/error.hpp"
#include "bnqn/linalg2.hpp"
#include "bnqn/objective.hpp"

namespace bnqn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

Complex newton_quotient(const Jet2<double>& jet) {
  if (std::abs(jet.df) < kDerivativeFloor)
    throw Error(ErrorCode::CriticalPointHit, "f' vanishes at the iterate");
  return jet.f / jet.df;
}

RunOutcome classify_outcome(const FunctionSpec& spec, Complex z, int iters, const StopRule& stop,
                            const JetOptions& opt, OutcomeKind otherwise) {
  switch (classify_point<double>(spec, z, {stop.root_tol, stop.crit_tol}, opt)) {
    case PointClass::Root: return {OutcomeKind::ConvergedToRoot, z, iters};
    case PointClass::CriticalNotRoot: return {OutcomeKind::ConvergedToCritical, z, iters};
    case PointClass::Pole: return {OutcomeKind::PoleHit, z, iters};
    case PointClass::Regular: break;
  }
  return {otherwise, z, iters};
}

// Shared loop for the f/f' family; `gamma_at(k)` supplies the relaxation factor.
template <typename GammaAt>
RunOutcome run_quotient_method(const FunctionSpec& spec, Complex z, const StopRule& stop, const JetOptions& opt,
                               GammaAt&& gamma_at) {
  for (int k = 0;; ++k) {
    if (!(std::abs(z) <= stop.escape_radius)) return {OutcomeKind::Diverged, z, k};
    Jet2<double> jet;
    try {
      jet = eval_jet<double>(spec, z, opt);
    } catch (const PoleError&) {
      return {OutcomeKind::PoleHit, z, k};
    } catch (const Error&) {
      return {OutcomeKind::Diverged, z, k};
    }
    if (std::abs(jet.f) <= stop.root_tol) return {OutcomeKind::ConvergedToRoot, z, k};
    if (std::abs(jet.df) <= stop.crit_tol) return {OutcomeKind::ConvergedToCritical, z, k};
    if (k >= stop.max_iter) return {OutcomeKind::MaxIterReached, z, k};
    z -= gamma_at(k) * (jet.f / jet.df);
  }
}

}  // namespace

Complex newton_step(const FunctionSpec& spec, Complex z, const JetOptions& opt) {
  return z - newton_quotient(eval_jet<double>(spec, z, opt));
}

Complex relaxed_step(const FunctionSpec& spec, Complex z, Complex gamma, const JetOptions& opt) {
  if (gamma == Complex(0)) throw Error(ErrorCode::InvalidArgument, "gamma: must be nonzero");
  return z - gamma * newton_quotient(eval_jet<double>(spec, z, opt));
}

Complex random_gamma(const RandomRelaxedState& state) {
  const std::uint64_t h1 = splitmix64(state.seed ^ splitmix64(state.step));
  const std::uint64_t h2 = splitmix64(h1);
  // Uniform on the disc: radius scales with sqrt of a uniform variate.
  const double rho = state.radius * std::sqrt(unit_double(h1));
  const double phi = 2.0 * std::numbers::pi * unit_double(h2);
  return Complex(1.0, 0.0) + std::polar(rho, phi);
}

Complex random_relaxed_step(const FunctionSpec& spec, Complex z, RandomRelaxedState& state, const JetOptions& opt) {
  const Complex gamma = random_gamma(state);
  const Complex next = relaxed_step(spec, z, gamma, opt);
  ++state.step;
  return next;
}

Complex newton_opt_step(const FunctionSpec& spec, Complex z, const JetOptions& opt) {
  const auto gh = evaluate_objective<double>(spec, z, opt);
  if (gh.hess.det() == 0.0) throw Error(ErrorCode::SingularHessian, "Hessian of F is singular");
  try {
    const Vec2<double> step = solve_sym2(gh.hess, gh.grad);
    return z - Complex(step.x(), step.y());
  } catch (const Error&) {
    throw Error(ErrorCode::SingularHessian, "Hessian of F is singular");
  }
}

Complex flow_field(const FunctionSpec& spec, Complex z, const FlowParams& params, const JetOptions& opt) {
  const auto jet = eval_jet<double>(spec, z, opt);
  if (params.mode == FlowMode::Raw) {
    if (std::abs(jet.df) < params.singular_tol)
      throw Error(ErrorCode::StepNearSingularity, "|f'| below singular_tol along the flow");
    return -jet.f / jet.df;
  }
  const double m2 = std::norm(jet.f);
  return -jet.f * std::conj(jet.df) * (m2 / (1.0 + m2 * m2));
}

namespace {

Complex rk4_step(const FunctionSpec& spec, Complex z, double dt, const FlowParams& params, const JetOptions& opt) {
  const Complex k1 = flow_field(spec, z, params, opt);
  const Complex k2 = flow_field(spec, z + 0.5 * dt * k1, params, opt);
  const Complex k3 = flow_field(spec, z + 0.5 * dt * k2, params, opt);
  const Complex k4 = flow_field(spec, z + dt * k3, params, opt);
  return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<FlowSample> newton_flow(const FunctionSpec& spec, Complex z0, const FlowParams& params,
                                    const JetOptions& opt) {
  if (!(params.dt > 0.0) || !(params.dt <= params.t_max))
    throw Error(ErrorCode::InvalidArgument, "dt: must satisfy 0 < dt <= t_max");
  const auto steps = static_cast<long>(std::llround(params.t_max / params.dt));
  const int every = std::max(1, params.record_every);
  std::vector<FlowSample> out{{0.0, z0}};
  Complex z = z0;
  for (long n = 1; n <= steps; ++n) {
    z = rk4_step(spec, z, params.dt, params, opt);
    if (n % every == 0 || n == steps) out.push_back({double(n) * params.dt, z});
  }
  return out;
}

RunOutcome run_relaxed(const FunctionSpec& spec, Complex z0, Complex gamma, const StopRule& stop,
                       const JetOptions& opt) {
  return run_quotient_method(spec, z0, stop, opt, [gamma](int) { return gamma; });
}

RunOutcome run_random_relaxed(const FunctionSpec& spec, Complex z0, RandomRelaxedState state, const StopRule& stop,
                              const JetOptions& opt) {
  const std::uint64_t base = state.step;
  return run_quotient_method(spec, z0, stop, opt, [&](int k) {
    state.step = base + std::uint64_t(k);
    return random_gamma(state);
  });
}

RunOutcome run_newton_opt(const FunctionSpec& spec, Complex z, const StopRule& stop, const JetOptions& opt) {
  for (int k = 0;; ++k) {
    if (!(std::abs(z) <= stop.escape_radius)) return {OutcomeKind::Diverged, z, k};
    GradHess<double> gh;
    try {
      gh = evaluate_objective<double>(spec, z, opt);
    } catch (const PoleError&) {
      return {OutcomeKind::PoleHit, z, k};
    } catch (const Error&) {
      return {OutcomeKind::Diverged, z, k};
    }
    if (gh.grad.norm() <= stop.grad_tol) {
      const auto out = classify_outcome(spec, z, k, stop, opt, OutcomeKind::MaxIterReached);
      if (out.kind != OutcomeKind::MaxIterReached) return out;
    }
    if (k >= stop.max_iter) return {OutcomeKind::MaxIterReached, z, k};
    try {
      const Vec2<double> step = solve_sym2(gh.hess, gh.grad);
      z -= Complex(step.x(), step.y());
    } catch (const Error&) {
      return classify_outcome(spec, z, k, stop, opt, OutcomeKind::MaxIterReached);
    }
  }
}

RunOutcome run_flow(const FunctionSpec& spec, Complex z, const FlowParams& params, const StopRule& stop,
                    const JetOptions& opt) {
  const auto steps = static_cast<long>(std::llround(params.t_max / params.dt));
  FlowParams raw = params;
  raw.mode = FlowMode::Raw;
  for (long n = 0;; ++n) {
    const int iters = static_cast<int>(n);
    if (!(std::abs(z) <= stop.escape_radius)) return {OutcomeKind::Diverged, z, iters};
    try {
      const auto jet = eval_jet<double>(spec, z, opt);
      if (std::abs(jet.f) <= stop.root_tol) return {OutcomeKind::ConvergedToRoot, z, iters};
      if (n >= steps) return {OutcomeKind::MaxIterReached, z, iters};
      z = rk4_step(spec, z, raw.dt, raw, opt);
    } catch (const PoleError&) {
      return {OutcomeKind::PoleHit, z, iters};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::StepNearSingularity)
        return classify_outcome(spec, z, iters, stop, opt, OutcomeKind::MaxIterReached);
      return {OutcomeKind::Diverged, z, iters};
    }
  }
}

std::vector<Complex> newton_iterates(const FunctionSpec& spec, Complex z0, int n, Complex gamma,
                                     const JetOptions& opt) {
  std::vector<Complex> pts{z0};
  for (int k = 0; k < n; ++k) {
    const auto jet = eval_jet<double>(spec, pts.back(), opt);
    if (std::abs(jet.df) < std::numeric_limits<double>::min() || jet.f == Complex(0)) break;
    pts.push_back(pts.back() - gamma * jet.f / jet.df);
  }
  return pts;
}

}  // namespace bnqn
