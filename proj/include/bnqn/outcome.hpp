#pragma once

#include <complex>

namespace bnqn {

enum class OutcomeKind { ConvergedToRoot, ConvergedToCritical, Diverged, PoleHit, MaxIterReached };

const char* to_string(OutcomeKind k);

/// Terminal state of a run; `point` is the root, critical point or last iterate.
struct RunOutcome {
  OutcomeKind kind{OutcomeKind::MaxIterReached};
  std::complex<double> point{};
  int iters{0};
};

/// Stopping rule shared by every iterative method.
struct StopRule {
  double grad_tol = 1e-10;
  double root_tol = 1e-8;
  double crit_tol = 1e-8;
  double escape_radius = 1e6;
  int max_iter = 1000;
};

inline const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::ConvergedToRoot: return "ConvergedToRoot";
    case OutcomeKind::ConvergedToCritical: return "ConvergedToCritical";
    case OutcomeKind::Diverged: return "Diverged";
    case OutcomeKind::PoleHit: return "PoleHit";
    case OutcomeKind::MaxIterReached: return "MaxIterReached";
  }
  return "Unknown";
}

}  // namespace bnqn
