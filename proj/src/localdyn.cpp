#include "bnqn/localdyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bnqn/error.hpp"

namespace bnqn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed angular difference wrapped to (-pi, pi].
double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -std::numbers::pi ? a + kTwoPi : a;
}

}  // namespace

double arg_0_2pi(Complex z) {
  const double a = std::arg(z);
  return a <= 0.0 ? a + kTwoPi : a;
}

Complex phi1(Complex z, int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "d: must be >= 2");
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  return z - std::pow(std::conj(z), d - 1) / (double(d - 1) * std::pow(r, d - 2));
}

RayReport ray_multiplier(int d, int j) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "d: must be >= 2");
  if (j < 0 || j >= 2 * d) throw Error(ErrorCode::InvalidArgument, "j: must lie in [0, 2d)");
  const bool odd = j % 2 != 0;
  const double m = 1.0 - (odd ? -1.0 : 1.0) / double(d - 1);
  return {d, j, m, odd ? RayKind::Unstable : RayKind::Stable};
}

SaddleProbeResult sector_probe_phi1(Complex z0, int d, int max_iter, double exit_radius) {
  if (z0 == Complex(0)) throw Error(ErrorCode::InvalidArgument, "z0: must be nonzero");
  SaddleProbeResult out;
  out.start = z0;
  const double step = std::numbers::pi / d;
  const double a0 = arg_0_2pi(z0);
  const double pos = a0 / step;
  const double j_lo = std::floor(pos);
  const bool on_ray = std::abs(pos - std::round(pos)) < 1e-12;

  const double lower = j_lo * step;
  const double upper = (j_lo + 1.0) * step;
  const int odd = static_cast<int>(j_lo) % 2 != 0 ? static_cast<int>(j_lo) : static_cast<int>(j_lo) + 1;
  const double target = odd * step;
  constexpr double kEdgeTol = 1e-12;

  Complex z = z0;
  out.angle_sequence.push_back(a0);
  double prev_dist = std::abs(a0 - target);
  for (int n = 1; n <= max_iter; ++n) {
    z = phi1(z, d);
    if (z == Complex(0)) break;
    double a = arg_0_2pi(z);
    // Keep the sector continuous across the 2 pi seam.
    if (upper > kTwoPi - kEdgeTol && a < step) a += kTwoPi;
    if (lower < kEdgeTol && a > kTwoPi - step) a -= kTwoPi;
    out.angle_sequence.push_back(a);
    if (!on_ray) {
      if (a < lower - kEdgeTol || a > upper + kEdgeTol) out.sector_invariant = false;
      const double dist = std::abs(a - target);
      if (!(dist < prev_dist) && prev_dist > kEdgeTol) out.monotone = false;
      prev_dist = dist;
    }
    if (std::abs(z) > exit_radius) {
      out.exit_step = n;
      out.final_classification = SaddleClass::LeftDisc;
      return out;
    }
  }
  if (std::abs(z) <= 1e-10 * std::abs(z0)) out.final_classification = SaddleClass::ConvergedToCritical;
  return out;
}

std::vector<Complex> taylor_coefficients(const FunctionSpec& spec, Complex z, int n, double rho,
                                         const JetOptions& opt) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho: must be positive");
  constexpr int kNodes = 64;
  std::vector<Complex> values(kNodes);
  for (int k = 0; k < kNodes; ++k)
    values[k] = eval_jet<double>(spec, z + std::polar(rho, kTwoPi * k / kNodes), opt).f;
  std::vector<Complex> out(n + 1);
  for (int m = 0; m <= n; ++m) {
    Complex acc(0);
    for (int k = 0; k < kNodes; ++k) acc += values[k] * std::polar(1.0, -kTwoPi * double(m) * k / kNodes);
    out[m] = acc / (double(kNodes) * std::pow(rho, m));
  }
  return out;
}

double nearest_special_distance(const FunctionSpec& spec, Complex z_star) {
  std::vector<Complex> pts = known_zeros(spec, z_star, 1e3);
  for (auto* extra : {&known_poles, &known_critical_points}) {
    const auto more = (*extra)(spec);
    pts.insert(pts.end(), more.begin(), more.end());
  }
  double best = std::numeric_limits<double>::infinity();
  for (Complex p : pts) {
    const double dist = std::abs(p - z_star);
    if (dist > 1e-9 * (1.0 + std::abs(z_star))) best = std::min(best, dist);
  }
  return std::isfinite(best) ? best : 1.0;
}

LocalModel local_model(const FunctionSpec& spec, Complex z_star, double threshold, double rho) {
  if (rho <= 0.0) rho = std::min(0.1, 0.5 * nearest_special_distance(spec, z_star));
  constexpr int kMaxOrder = 20;
  const auto a = taylor_coefficients(spec, z_star, kMaxOrder, rho);
  LocalModel m;
  m.a0 = eval_jet<double>(spec, z_star).f;
  const double scale = std::max(1.0, std::abs(m.a0));
  for (int k = 1; k <= kMaxOrder; ++k) {
    if (std::abs(a[k]) > threshold * scale) {
      m.d = k;
      m.ad = a[k];
      break;
    }
  }
  if (m.d == 0) throw Error(ErrorCode::ProbeFailed, "local model: no non-vanishing Taylor coefficient up to order 20");
  m.phase = std::arg(std::conj(m.a0) * m.ad);
  return m;
}

double repulsion_sector_half_width(int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "d: must be >= 2");
  return std::acos(0.5 - 3.0 / (8.0 * (d - 1))) / d;
}

LocalProbeReport bnqn_local_probe(const FunctionSpec& spec, Complex z_star, const BnqnParams& params,
                                  const LocalProbeOptions& options) {
  if (options.samples < 1) throw Error(ErrorCode::InvalidArgument, "samples: must be >= 1");
  LocalProbeReport rep;
  rep.critical_point = z_star;
  rep.model = local_model(spec, z_star);
  const int d = rep.model.d;
  if (rep.model.a0 == Complex(0) || d < 2)
    throw Error(ErrorCode::ProbeFailed, "critical_point: not a critical point of f that is not a root");

  rep.r0 = options.r0 ? *options.r0 : 1e-3 * nearest_special_distance(spec, z_star);
  const double amp = std::abs(rep.model.a0) * std::abs(rep.model.ad);
  rep.expected_eigenvalue = d * (d - 1) * amp * std::pow(rep.r0, d - 2);
  rep.repulsion_half_width =
      options.repulsion_half_width ? *options.repulsion_half_width : 0.9 * repulsion_sector_half_width(d);
  rep.repulsion_bound = (2.0 * d - 1.0) / (2.0 * d - 2.0);
  rep.min_repulsion_ratio = std::numeric_limits<double>::infinity();

  int bad_delta = 0, bad_gamma = 0, bad_cap = 0, bad_eig = 0, bad_repel = 0, bad_eval = 0;
  for (int k = 0; k < options.samples; ++k) {
    const double angle = kTwoPi * (k + 1) / options.samples;
    const Complex z = z_star + std::polar(rep.r0, angle);
    LocalSample s{};
    s.z = z;
    s.angle = angle;
    try {
      const auto gh = evaluate_objective<double>(spec, z, params.jet);
      const auto dir = bnqn_direction(gh, params);
      const auto rec = bnqn_step_from(z, gh, spec, params);
      s.delta_index = rec.delta_index;
      s.gamma = rec.gamma;
      s.capped = dir.capped;
      s.modulus_ratio = std::abs(rec.next - z_star) / rep.r0;
      const auto eig = eigen_sym2(gh.hess);
      const double err1 = std::abs(std::abs(eig.lam1) - rep.expected_eigenvalue);
      const double err2 = std::abs(std::abs(eig.lam2) - rep.expected_eigenvalue);
      s.eig_rel_err = std::max(err1, err2) / rep.expected_eigenvalue;
      if (eig.lam1 * eig.lam2 > 0.0) s.eig_rel_err = std::max(s.eig_rel_err, 1.0);
    } catch (const Error&) {
      ++bad_eval;
      s.eig_rel_err = std::numeric_limits<double>::infinity();
    }
    s.unstable_offset = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      const double ray = (std::numbers::pi - rep.model.phase + kTwoPi * j) / d;
      s.unstable_offset = std::min(s.unstable_offset, std::abs(wrap_angle(angle - ray)));
    }

    if (s.delta_index != 0) ++bad_delta;
    if (s.gamma != params.gamma0) ++bad_gamma;
    if (s.capped) ++bad_cap;
    if (!(s.eig_rel_err <= options.eigen_rel_tol)) ++bad_eig;
    rep.max_eig_rel_err = std::max(rep.max_eig_rel_err, s.eig_rel_err);
    if (s.unstable_offset < rep.repulsion_half_width) {
      ++rep.repulsion_samples;
      rep.min_repulsion_ratio = std::min(rep.min_repulsion_ratio, s.modulus_ratio);
      if (!(s.modulus_ratio >= rep.repulsion_bound - options.repulsion_slack)) ++bad_repel;
    }
    rep.samples.push_back(s);
  }

  // d from the scaling of the Hessian spectrum between r0 and r0 / 2.
  try {
    auto spectral = [&](double r) {
      const auto e = eigen_sym2(evaluate_objective<double>(spec, z_star + Complex(r, 0.0), params.jet).hess);
      return std::max(std::abs(e.lam1), std::abs(e.lam2));
    };
    rep.d_estimate = 2.0 + std::log2(spectral(rep.r0) / spectral(0.5 * rep.r0));
  } catch (const Error&) {
    rep.d_estimate = std::numeric_limits<double>::quiet_NaN();
  }

  auto note = [&](int count, const char* what) {
    if (count == 0) return;
    std::ostringstream os;
    os << what << " at " << count << " of " << options.samples << " samples";
    rep.failures.push_back(os.str());
  };
  note(bad_eval, "evaluation failed");
  note(bad_delta, "delta_index != 0");
  note(bad_gamma, "gamma != gamma0");
  note(bad_cap, "theta-cap active");
  note(bad_eig, "Hessian eigenvalue outside tolerance");
  note(bad_repel, "modulus growth below (2d-1)/(2d-2) near an unstable ray");
  if (!(std::abs(rep.d_estimate - d) < 0.25)) {
    std::ostringstream os;
    os << "d estimate " << rep.d_estimate << " disagrees with Taylor order " << d;
    rep.failures.push_back(os.str());
  }
  return rep;
}

void require_pass(const LocalProbeReport& report) {
  if (!report.pass()) throw Error(ErrorCode::ProbeFailed, report.failures.front());
}

RateEstimate contraction_rate(std::span<const Complex> points, Complex limit, int min_tail) {
  std::vector<double> logs;
  for (Complex p : points) {
    const double e = std::abs(p - limit);
    if (!(e > 0.0) || !std::isfinite(e)) break;
    logs.push_back(std::log(e));
  }
  RateEstimate out;
  // The orbit landed on the limit exactly, or the error ratios collapse towards 0.
  const int n = static_cast<int>(logs.size());
  if (n >= 1 && n < static_cast<int>(points.size())) {
    const double last_ratio = n >= 2 ? std::exp(logs[n - 1] - logs[n - 2]) : 0.0;
    if (n < min_tail || last_ratio < 0.05) {
      out.superlinear = true;
      out.tail_points = n;
      return out;
    }
  }
  if (n < min_tail) {
    throw Error(ErrorCode::InsufficientTail, "trace: fewer than " + std::to_string(min_tail) + " usable tail points");
  }
  const int start = n - std::max(min_tail, n / 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = n - start;
  for (int i = start; i < n; ++i) {
    sx += i;
    sy += logs[i];
    sxx += double(i) * i;
    sxy += i * logs[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.ratio = std::exp(slope);
  out.tail_points = m;
  out.superlinear = out.ratio < 0.05;
  if (out.superlinear) out.ratio = 0.0;
  return out;
}

double m_value(double alpha, int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "d: must be >= 2");
  const Complex u = std::polar(1.0, alpha) / double(d - 1);
  const Complex m = 2.0 / 3.0 + double(d - 1) / 2.0 * u + double(d - 1) * (d - 2) / 6.0 * u * u;
  return m.real();
}

MBoundResult m_bound_sweep(int d_min, int d_max, int alpha_steps) {
  if (d_min < 2 || d_max < d_min) throw Error(ErrorCode::InvalidArgument, "d_range: need 2 <= d_min <= d_max");
  if (alpha_steps < 2) throw Error(ErrorCode::InvalidArgument, "alpha_steps: must be >= 2");
  MBoundResult best{std::numeric_limits<double>::infinity(), 0, 0.0};
  const double lo = -0.75 * std::numbers::pi;
  const double hi = 1.25 * std::numbers::pi;
  for (int d = d_min; d <= d_max; ++d) {
    for (int k = 0; k < alpha_steps; ++k) {
      const double alpha = lo + (hi - lo) * k / (alpha_steps - 1);
      const double m = m_value(alpha, d);
      if (m < best.min) best = {m, d, alpha};
    }
  }
  return best;
}

}  // namespace bnqn
