#pragma once

// Local dynamics near a critical point z* of f (f'(z*) = 0, f(z*) != 0) and near
// roots: the linear model map, ray multipliers, saddle probes and rate fits.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnqn/bnqn.hpp"
#include "bnqn/function_spec.hpp"

namespace bnqn {

/// Argument on the branch (0, 2*pi].
double arg_0_2pi(Complex z);

/// z - conj(z)^(d-1) / ((d-1) |z|^(d-2)); 0 at the origin by continuity.
Complex phi1(Complex z, int d);

enum class RayKind { Stable, Unstable };

struct RayReport {
  int d;
  int j;
  double multiplier;
  RayKind kind;
};

/// Multiplier of phi1 along the ray arg z = pi j / d: 1 - (-1)^j / (d-1).
RayReport ray_multiplier(int d, int j);

enum class SaddleClass { LeftDisc, ConvergedToCritical, Undecided };

struct SaddleProbeResult {
  Complex start;
  std::optional<int> exit_step;  // first n with |z_n| > exit_radius
  std::vector<double> angle_sequence;
  SaddleClass final_classification{SaddleClass::Undecided};
  bool sector_invariant{true};  // every iterate stayed in the starting open sector
  bool monotone{true};          // distance to the bounding unstable ray strictly decreased
};

/**
 * Iterates phi1 from z0 for up to max_iter steps, tracking the angle relative to
 * the sector between consecutive rays pi j / d that contains z0.
 */
SaddleProbeResult sector_probe_phi1(Complex z0, int d, int max_iter, double exit_radius = 1.0);

/// Taylor coefficients a_0..a_n of f at z, from the Cauchy integral on a circle of radius rho.
std::vector<Complex> taylor_coefficients(const FunctionSpec& spec, Complex z, int n, double rho,
                                         const JetOptions& opt = {});

/// Local model f(z* + w) = a0 + ad w^d + ...
struct LocalModel {
  int d{0};
  Complex a0;
  Complex ad;
  /// Phase of conj(a0) ad; stable rays satisfy d theta + phase = 0 mod 2 pi.
  double phase{0};
};

/// d = order of the first non-vanishing Taylor coefficient of f - f(z*) (threshold relative to max(1, |a0|)).
LocalModel local_model(const FunctionSpec& spec, Complex z_star, double threshold = 1e-9, double rho = 0.0);

/// Distance from z* to the nearest other root, critical point or pole of f that can be located.
double nearest_special_distance(const FunctionSpec& spec, Complex z_star);

/// Half-width of the sector around an unstable ray where the leading-order step
/// grows the modulus by at least (2d-1)/(2d-2): arccos(1/2 - 3/(8(d-1))) / d.
double repulsion_sector_half_width(int d);

struct LocalProbeOptions {
  int samples = 360;
  std::optional<double> r0;  // default 1e-3 * nearest_special_distance
  double eigen_rel_tol = 0.05;
  double repulsion_slack = 1e-3;
  /// Sector half-width for the repulsion check; default 0.9 * repulsion_sector_half_width(d).
  std::optional<double> repulsion_half_width;
};

struct LocalSample {
  Complex z;
  double angle;  // arg(z - z*) in (0, 2 pi]
  int delta_index;
  double gamma;
  bool capped;
  double modulus_ratio;  // |Phi(z) - z*| / |z - z*|
  double unstable_offset;  // angular distance to the nearest unstable ray
  double eig_rel_err;
};

struct LocalProbeReport {
  Complex critical_point;
  LocalModel model;
  double r0{0};
  double expected_eigenvalue{0};  // d (d-1) |conj(a0) ad| r0^(d-2)
  double max_eig_rel_err{0};
  double d_estimate{0};
  double repulsion_half_width{0};
  double repulsion_bound{0};
  double min_repulsion_ratio{0};
  int repulsion_samples{0};
  std::vector<LocalSample> samples;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

/**
 * Runs one BNQN step from `samples` points on the circle |z - z*| = r0 and checks
 * the small-|z| regime: delta index 0, gamma = gamma0, theta-cap inactive, Hessian
 * eigenvalues near +-d(d-1)|a0 ad| r0^(d-2), and modulus growth near unstable rays.
 */
LocalProbeReport bnqn_local_probe(const FunctionSpec& spec, Complex z_star, const BnqnParams& params,
                                  const LocalProbeOptions& options = {});

/// Throws Error(ProbeFailed) naming the first violated assertion.
void require_pass(const LocalProbeReport& report);

struct RateEstimate {
  double ratio{0};
  bool superlinear{false};
  int tail_points{0};
};

/// Geometric convergence ratio of |z_n - limit| from a least-squares fit of the log tail.
RateEstimate contraction_rate(std::span<const Complex> points, Complex limit, int min_tail = 5);

/// Re[2/3 + (d-1)/2 u + (d-1)(d-2)/6 u^2] with u = e^{i alpha} / (d-1).
double m_value(double alpha, int d);

struct MBoundResult {
  double min{0};
  int argmin_d{0};
  double argmin_alpha{0};
};

/// Minimum of m_value over d in [d_min, d_max] and alpha_steps points of [-3pi/4, 5pi/4].
MBoundResult m_bound_sweep(int d_min, int d_max, int alpha_steps);

}  // namespace bnqn
