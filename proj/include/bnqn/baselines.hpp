#pragma once

// Classical comparison methods: Newton, relaxed and random relaxed Newton,
// Newton's method for optimization on F, and Newton's flow.

#include <cstdint>
#include <utility>
#include <vector>

#include "bnqn/function_spec.hpp"
#include "bnqn/jet.hpp"
#include "bnqn/outcome.hpp"

namespace bnqn {

/// Below this |f'| the Newton quotient f/f' is not formed.
inline constexpr double kDerivativeFloor = 1e-14;

Complex newton_step(const FunctionSpec& spec, Complex z, const JetOptions& opt = {});

/// z - gamma f(z) / f'(z)
Complex relaxed_step(const FunctionSpec& spec, Complex z, Complex gamma, const JetOptions& opt = {});

/// Counter-based generator state: gamma_n is a pure function of (seed, step).
struct RandomRelaxedState {
  std::uint64_t seed{0};
  std::uint64_t step{0};
  double radius{0.5};  // gamma_n uniform on the disc |gamma - 1| <= radius
};

/// gamma drawn for the current counter value (does not advance the state).
Complex random_gamma(const RandomRelaxedState& state);

/// Relaxed step with gamma_n = random_gamma(state); advances state.step.
Complex random_relaxed_step(const FunctionSpec& spec, Complex z, RandomRelaxedState& state,
                            const JetOptions& opt = {});

/// z - (hess F)^{-1} grad F
Complex newton_opt_step(const FunctionSpec& spec, Complex z, const JetOptions& opt = {});

enum class FlowMode { Raw, Desingularized };

struct FlowParams {
  double dt = 1e-3;
  double t_max = 10.0;
  FlowMode mode = FlowMode::Raw;
  double singular_tol = 1e-10;  // Raw mode stops when |f'| drops below this
  int record_every = 1;
};

struct FlowSample {
  double t;
  Complex z;
};

/// Velocity of the flow at z: -f/f' (Raw) or -f conj(f') |f|^2 / (1 + |f|^4).
Complex flow_field(const FunctionSpec& spec, Complex z, const FlowParams& params, const JetOptions& opt = {});

/// Classical RK4 with fixed step dt from t = 0 to t_max.
std::vector<FlowSample> newton_flow(const FunctionSpec& spec, Complex z0, const FlowParams& params,
                                    const JetOptions& opt = {});

// Run loops used for basin classification. Every failure mode maps to an outcome.

RunOutcome run_relaxed(const FunctionSpec& spec, Complex z0, Complex gamma, const StopRule& stop,
                       const JetOptions& opt = {});
RunOutcome run_random_relaxed(const FunctionSpec& spec, Complex z0, RandomRelaxedState state, const StopRule& stop,
                              const JetOptions& opt = {});
RunOutcome run_newton_opt(const FunctionSpec& spec, Complex z0, const StopRule& stop, const JetOptions& opt = {});
/// Integrates the Raw flow until |f| <= root_tol or t >= t_max.
RunOutcome run_flow(const FunctionSpec& spec, Complex z0, const FlowParams& params, const StopRule& stop,
                    const JetOptions& opt = {});

/// Iterates of relaxed Newton for exactly n steps (or until |f'| vanishes); for rate estimation.
std::vector<Complex> newton_iterates(const FunctionSpec& spec, Complex z0, int n, Complex gamma = 1.0,
                                     const JetOptions& opt = {});

}  // namespace bnqn
