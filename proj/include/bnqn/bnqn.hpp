#pragma once

// Backtracking New Q-Newton's method on F = |f|^2 / 2.
//
// One iteration from z:
//   j      = first index with minsp(H + delta_j |grad F|^tau Id) >= kappa |grad F|^tau
//   A      = H + delta_j |grad F|^tau Id
//   v      = A^{-1} grad F,  w = pr_+(v) - pr_-(v),  w_hat = w / max(1, theta |w|)
//   gamma  = gamma0 * backoff^k, smallest k with
//            F(z - gamma w_hat) - F(z) <= -armijo_c * gamma * <w_hat, grad F>
//   z_next = z - gamma w_hat

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "bnqn/error.hpp"
#include "bnqn/objective.hpp"
#include "bnqn/outcome.hpp"

namespace bnqn {

struct BnqnParams {
  std::array<double, 3> deltas{0.0, 1.0, 2.0};
  int tau = 2;
  double theta = 1.0;
  double gamma0 = 1.0;
  double backoff = 1.0 / 3.0;
  double armijo_c = 1.0 / 3.0;
  int max_armijo = 200;
  StopRule stop{};
  JetOptions jet{};
};

/// Throws Error(InvalidArgument) whose message starts with the offending field name.
void validate(const BnqnParams& params);

/// Half the minimum pairwise gap of the deltas.
inline double kappa(std::span<const double> deltas) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < deltas.size(); ++i)
    for (std::size_t j = i + 1; j < deltas.size(); ++j) gap = std::min(gap, std::abs(deltas[i] - deltas[j]));
  if (!(gap > 0.0)) throw Error(ErrorCode::DuplicateDeltas, "deltas must be pairwise distinct");
  return gap / 2;
}

/// Smallest j with minsp(H + delta_j g Id) >= kappa g, where g = |grad F|^tau.
template <typename Scalar>
int select_delta(const Sym2<Scalar>& hess, Scalar g, const BnqnParams& params) {
  const Scalar k = Scalar(kappa(params.deltas)) * g;
  for (int j = 0; j < static_cast<int>(params.deltas.size()); ++j) {
    if (minsp(hess.shifted(Scalar(params.deltas[j]) * g)) >= k) return j;
  }
  // Each eigenvalue of H rules out at most one delta, so with 3 deltas one always survives.
  throw Error(ErrorCode::InternalInvariantViolation, "no delta satisfies the minsp condition");
}

template <typename Scalar>
struct Direction {
  Vec2<Scalar> w_hat;
  int delta_index{0};
  Vec2<Scalar> w;
  Sym2<Scalar> a;  // the regularised matrix A
  bool capped{false};
};

template <typename Scalar>
Scalar grad_power(Scalar grad_norm, int tau) {
  Scalar out(1);
  for (int i = 0; i < tau; ++i) out *= grad_norm;
  return out;
}

template <typename Scalar>
Direction<Scalar> bnqn_direction(const GradHess<Scalar>& gh, const BnqnParams& params) {
  const Scalar gpow = grad_power(gh.grad.norm(), params.tau);
  Direction<Scalar> out;
  out.delta_index = select_delta(gh.hess, gpow, params);
  out.a = gh.hess.shifted(Scalar(params.deltas[out.delta_index]) * gpow);
  const Vec2<Scalar> v = solve_sym2(out.a, gh.grad);
  const auto pr = project_signed(out.a, v);
  out.w = pr.plus - pr.minus;
  const Scalar denom = std::max(Scalar(1), Scalar(params.theta) * out.w.norm());
  out.capped = denom > Scalar(1);
  out.w_hat = out.w / denom;
  return out;
}

inline std::complex<double> to_complex(const Vec2<double>& v) { return {v.x(), v.y()}; }

template <typename Scalar>
std::complex<Scalar> as_complex(const Vec2<Scalar>& v) {
  return {v.x(), v.y()};
}

template <typename Scalar>
struct ArmijoResult {
  Scalar gamma;
  int trials;  // number of backoffs before acceptance
};

/**
 * Backtracking line search along -w_hat.
 *
 * `objective` maps a point to F; a thrown PoleError or Overflow at a trial point
 * counts as F = +inf and triggers another backoff.
 */
template <typename Scalar, typename Objective>
ArmijoResult<Scalar> armijo_search(std::complex<Scalar> z, const Vec2<Scalar>& w_hat, const GradHess<Scalar>& gh,
                                   const BnqnParams& params, Objective&& objective) {
  const Scalar slope = w_hat.dot(gh.grad);
  const std::complex<Scalar> dir = as_complex(w_hat);
  Scalar gamma(params.gamma0);
  for (int trials = 0; trials <= params.max_armijo; ++trials) {
    Scalar trial = std::numeric_limits<Scalar>::infinity();
    try {
      trial = objective(z - gamma * dir);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PoleAt && e.code() != ErrorCode::Overflow) throw;
    }
    if (trial - gh.fval <= -Scalar(params.armijo_c) * gamma * slope) return {gamma, trials};
    gamma *= Scalar(params.backoff);
  }
  throw Error(ErrorCode::ArmijoFloor, "Armijo backtracking exceeded max_armijo");
}

template <typename Scalar = double>
struct StepRecord {
  std::complex<Scalar> z;  // iterate the step starts from
  Scalar fval{0};
  Scalar grad_norm{0};
  int delta_index{0};
  Scalar gamma{0};
  Vec2<Scalar> w{Vec2<Scalar>::Zero()};
  Vec2<Scalar> w_hat{Vec2<Scalar>::Zero()};
  int armijo_trials{0};
  std::complex<Scalar> next;  // z - gamma w_hat
};

/// One iteration from z given its already evaluated objective.
template <typename Scalar>
StepRecord<Scalar> bnqn_step_from(std::complex<Scalar> z, const GradHess<Scalar>& gh, const FunctionSpec& spec,
                                  const BnqnParams& params) {
  StepRecord<Scalar> rec;
  rec.z = z;
  rec.fval = gh.fval;
  rec.grad_norm = gh.grad.norm();
  rec.gamma = Scalar(params.gamma0);
  rec.next = z;
  if (rec.grad_norm == Scalar(0)) return rec;  // critical point of F: fixed

  const auto dir = bnqn_direction(gh, params);
  rec.delta_index = dir.delta_index;
  rec.w = dir.w;
  rec.w_hat = dir.w_hat;
  const auto ls = armijo_search(z, dir.w_hat, gh, params, [&](std::complex<Scalar> p) {
    return objective_value(eval_jet<Scalar>(spec, p, params.jet));
  });
  rec.gamma = ls.gamma;
  rec.armijo_trials = ls.trials;
  rec.next = z - ls.gamma * as_complex(dir.w_hat);
  return rec;
}

/// One iteration of the method from z.
template <typename Scalar = double>
StepRecord<Scalar> bnqn_step(std::complex<Scalar> z, const FunctionSpec& spec, const BnqnParams& params) {
  return bnqn_step_from(z, evaluate_objective<Scalar>(spec, z, params.jet), spec, params);
}

template <typename Scalar = double>
struct RunResult {
  std::vector<StepRecord<Scalar>> trace;
  RunOutcome outcome;
};

namespace detail {

template <typename Scalar>
RunOutcome make_outcome(OutcomeKind kind, std::complex<Scalar> z, int iters) {
  return {kind, std::complex<double>(double(z.real()), double(z.imag())), iters};
}

}  // namespace detail

/**
 * Iterates from z0 until |grad F| <= grad_tol at a root or critical point of f,
 * |z| > escape_radius, a pole is hit, or max_iter steps were taken.
 *
 * A small gradient at a point that is neither a root nor a critical point of f
 * does not stop the run. An exhausted line search stops it with the
 * classification of the current iterate.
 */
template <typename Scalar = double>
RunResult<Scalar> run(std::complex<Scalar> z0, const FunctionSpec& spec, const BnqnParams& params,
                      bool keep_trace = true) {
  RunResult<Scalar> out;
  const ClassifyTol tol{params.stop.root_tol, params.stop.crit_tol};
  auto z = z0;
  auto classify_stop = [&](int iters, OutcomeKind otherwise) {
    switch (classify_point<Scalar>(spec, z, tol, params.jet)) {
      case PointClass::Root: return detail::make_outcome(OutcomeKind::ConvergedToRoot, z, iters);
      case PointClass::CriticalNotRoot: return detail::make_outcome(OutcomeKind::ConvergedToCritical, z, iters);
      case PointClass::Pole: return detail::make_outcome(OutcomeKind::PoleHit, z, iters);
      case PointClass::Regular: break;
    }
    return detail::make_outcome(otherwise, z, iters);
  };

  for (int k = 0;; ++k) {
    if (!(std::abs(z) <= Scalar(params.stop.escape_radius))) {
      out.outcome = detail::make_outcome(OutcomeKind::Diverged, z, k);
      return out;
    }
    GradHess<Scalar> gh;
    try {
      gh = evaluate_objective<Scalar>(spec, z, params.jet);
    } catch (const PoleError&) {
      out.outcome = detail::make_outcome(OutcomeKind::PoleHit, z, k);
      return out;
    } catch (const Error&) {
      out.outcome = detail::make_outcome(OutcomeKind::Diverged, z, k);
      return out;
    }

    const Scalar gnorm = gh.grad.norm();
    if (gnorm <= Scalar(params.stop.grad_tol)) {
      const auto cls = classify_stop(k, OutcomeKind::MaxIterReached);
      if (cls.kind != OutcomeKind::MaxIterReached || gnorm == Scalar(0)) {
        out.outcome = cls;
        return out;
      }
    }
    if (k >= params.stop.max_iter) {
      out.outcome = detail::make_outcome(OutcomeKind::MaxIterReached, z, k);
      return out;
    }

    StepRecord<Scalar> rec;
    try {
      rec = bnqn_step_from(z, gh, spec, params);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::ArmijoFloor: out.outcome = classify_stop(k, OutcomeKind::MaxIterReached); break;
        case ErrorCode::PoleAt: out.outcome = detail::make_outcome(OutcomeKind::PoleHit, z, k); break;
        case ErrorCode::Overflow: out.outcome = detail::make_outcome(OutcomeKind::Diverged, z, k); break;
        default: throw;
      }
      return out;
    }
    z = rec.next;
    if (keep_trace) out.trace.push_back(rec);
  }
}

/// Exactly n iterations of the update (no stopping rule); returns z_0..z_n.
template <typename Scalar = double>
std::vector<std::complex<Scalar>> iterate(std::complex<Scalar> z0, const FunctionSpec& spec, const BnqnParams& params,
                                          int n) {
  std::vector<std::complex<Scalar>> pts{z0};
  pts.reserve(n + 1);
  for (int k = 0; k < n; ++k) pts.push_back(bnqn_step<Scalar>(pts.back(), spec, params).next);
  return pts;
}

/// Up to n iterations from z0, stopping early at a fixed point or when a step fails.
template <typename Scalar = double>
std::vector<std::complex<Scalar>> orbit(std::complex<Scalar> z0, const FunctionSpec& spec, const BnqnParams& params,
                                        int n) {
  std::vector<std::complex<Scalar>> pts{z0};
  for (int k = 0; k < n; ++k) {
    StepRecord<Scalar> rec;
    try {
      rec = bnqn_step<Scalar>(pts.back(), spec, params);
    } catch (const Error&) {
      break;
    }
    if (rec.next == pts.back()) break;
    pts.push_back(rec.next);
  }
  return pts;
}

struct ConjugacyReport {
  double c{1};
  double angle{0};
  int steps{0};
  int starts{0};
  double max_rel_err{0};  // max |z'_n - A^{-1} z_n| / (1 + |z_n|)
  double tol{1e-9};
  bool pass() const { return max_rel_err <= tol; }
};

/// Parameters for G(z) = F(A z) with A = c R: deltas * c^(2 - tau), theta * c.
BnqnParams conjugate_params(const BnqnParams& params, double c);

/**
 * Runs `steps` iterations on f from each z0 and on z -> f(A z) from A^{-1} z0, with
 * A = c e^{i angle}, and records the worst relative deviation from z'_n = A^{-1} z_n.
 */
ConjugacyReport conjugacy_check(const FunctionSpec& spec, const BnqnParams& params, double c, double angle,
                                std::span<const Complex> starts, int steps, double tol = 1e-9);

}  // namespace bnqn
