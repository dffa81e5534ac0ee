// Acceptance criteria. Usage: acceptance <n> runs criterion n; without
// arguments every criterion runs. Exit status is 0 only if all selected pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bnqn/baselines.hpp"
#include "bnqn/basins.hpp"
#include "bnqn/bnqn.hpp"
#include "bnqn/localdyn.hpp"
#include "bnqn/objective.hpp"
#include "oracles/reference_bnqn.hpp"
#include "support/generators.hpp"

using namespace bnqn;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Verdict()> run;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

FunctionSpec monomial(int d) {
  std::vector<Complex> c(d + 1, 0.0);
  c[d] = 1.0;
  return Coeffs{c};
}

const FunctionSpec kQuartic = Coeffs{{1.0, 0.0, 0.0, 0.0, -1.0}};
const GridSpec kGrid256{{0.0, 0.0}, 2.0, 2.0, 256, 256};

MethodConfig method(Method m) {
  MethodConfig cfg;
  cfg.method = m;
  return cfg;
}

Verdict bnqn_rate() {
  constexpr double tol = 0.01;
  const Complex z0 = std::polar(0.1, 0.3);
  bool ok = true;
  std::string detail;
  for (int d = 2; d <= 4; ++d) {
    const auto est = contraction_rate(orbit<double>(z0, monomial(d), BnqnParams{}, 200), 0.0);
    const double expected = (2.0 * d - 2) / (2.0 * d - 1);
    ok = ok && !est.superlinear && std::abs(est.ratio - expected) <= tol;
    detail += "d=" + std::to_string(d) + " ratio " + num(est.ratio) + " (expected " + num(expected) + "); ";
  }
  const auto lin = contraction_rate(orbit<double>(z0, monomial(1), BnqnParams{}, 200), 0.0);
  ok = ok && lin.superlinear;
  detail += std::string("d=1 superlinear ") + (lin.superlinear ? "yes" : "no");
  return {ok, detail};
}

Verdict newton_rate() {
  constexpr double tol = 0.01;
  bool ok = true;
  std::string detail;
  for (int d = 2; d <= 3; ++d) {
    const auto est = contraction_rate(newton_iterates(monomial(d), std::polar(0.1, 0.3), 100), 0.0);
    const double expected = (d - 1.0) / d;
    ok = ok && std::abs(est.ratio - expected) <= tol;
    detail += "d=" + std::to_string(d) + " ratio " + num(est.ratio) + " (expected " + num(expected) + "); ";
  }
  return {ok, detail};
}

Verdict linearization_rays() {
  constexpr double tol = 1e-10;
  double worst = 0;
  for (int d = 3; d <= 8; ++d) {
    for (int j = 0; j < 2 * d; ++j) {
      const double m = ray_multiplier(d, j).multiplier;
      Complex z = std::polar(1e-2, kPi * j / d);
      for (int n = 0; n < 5; ++n) {
        const Complex next = phi1(z, d);
        worst = std::max(worst, std::abs(next / z - m));
        z = next;
      }
    }
  }
  return {worst <= tol, "max |z_{n+1}/z_n - m| = " + num(worst)};
}

Verdict conjugacy() {
  constexpr double tol = 1e-9;
  gen::Rng rng(20241015);
  std::vector<Complex> starts;
  for (int k = 0; k < 10; ++k) starts.push_back(rng.in_box(2.0));
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double c = rng.uniform(0.5, 2.0);
    const double angle = rng.uniform(0.0, 2 * kPi);
    worst = std::max(worst, conjugacy_check(kQuartic, BnqnParams{}, c, angle, starts, 50, tol).max_rel_err);
  }
  return {worst <= tol, "max relative deviation " + num(worst) + " over 20 maps x 10 starts x 50 steps"};
}

Verdict local_regime() {
  // 1 - z^4 has a3 = 0; its critical point is of order 4 with eigenvalues +-12 r^2.
  // The order-3 model +-6r is checked on 1 + z^3.
  constexpr double eig_tol = 0.05;
  LocalProbeOptions opt;
  opt.samples = 360;
  opt.r0 = 1e-3;
  opt.eigen_rel_tol = eig_tol;
  opt.repulsion_half_width = 0.0;  // repulsion is criterion 6
  std::string detail;
  bool ok = true;
  const FunctionSpec cubic = Coeffs{{1.0, 0.0, 0.0, 1.0}};
  for (const auto* spec : {&kQuartic, &cubic}) {
    const auto rep = bnqn_local_probe(*spec, 0.0, BnqnParams{}, opt);
    int regime = 0;
    for (const auto& s : rep.samples) regime += s.delta_index == 0 && s.gamma == 1.0 && !s.capped;
    const bool good = rep.pass() && regime == opt.samples && rep.max_eig_rel_err <= eig_tol;
    ok = ok && good;
    detail += (spec == &kQuartic ? "1-z^4" : "1+z^3") + std::string(": d=") + std::to_string(rep.model.d) +
              " regime " + std::to_string(regime) + "/" + std::to_string(opt.samples) + ", eigenvalue +-" +
              num(rep.expected_eigenvalue) + " max rel err " + num(rep.max_eig_rel_err) + "; ";
  }
  return {ok, detail};
}

Verdict repulsion() {
  const double bound = 1.2490;
  const FunctionSpec cubic = Coeffs{{1.0, 0.0, 0.0, 1.0}};
  const double r = 1e-3;
  const int n = 100;
  double worst = 1e300, worst_angle = 0;
  int below = 0;
  for (int k = 0; k < n; ++k) {
    // Evenly spaced over the open interval |arg z - pi/3| < pi/6.
    const double angle = kPi / 6 + (k + 1) * (kPi / 3) / (n + 1);
    const double ratio = std::abs(bnqn_step<double>(std::polar(r, angle), cubic, BnqnParams{}).next) / r;
    below += ratio < bound;
    if (ratio < worst) {
      worst = ratio;
      worst_angle = angle;
    }
  }
  return {below == 0, "min ratio " + num(worst) + " at |arg z - pi/3| = " + num(std::abs(worst_angle - kPi / 3)) +
                          "; " + std::to_string(below) + "/" + std::to_string(n) + " samples below " + num(bound)};
}

Verdict m_bound() {
  const auto res = m_bound_sweep(2, 20, 10000);
  return {res.min > 0.1, "min M = " + num(res.min) + " at d=" + std::to_string(res.argmin_d) +
                             ", alpha=" + num(res.argmin_alpha)};
}

Verdict coverage() {
  const auto s = basin_stats(classify_grid(kQuartic, method(Method::Bnqn), kGrid256));
  const bool ok = s.coverage >= 0.999 && s.critical_fraction + s.unresolved_fraction <= 0.001;
  return {ok, "coverage " + num(s.coverage) + ", critical " + num(s.critical_fraction) + ", unresolved " +
                  num(s.unresolved_fraction) + ", diverged " + num(s.diverged_fraction)};
}

Verdict root_census() {
  const FunctionSpec f = ExpAffine{{0.0, 2.0}, -1.0};
  const auto img = classify_grid(f, method(Method::Bnqn), GridSpec{{0.0, 0.0}, 10.0, 10.0, 128, 128});
  bool ok = img.roots.size() == 7;
  double worst = 0;
  for (int k = -3; k <= 3 && ok; ++k) {
    double best = 1e300;
    for (Complex r : img.roots) best = std::min(best, std::abs(r - k * kPi));
    worst = std::max(worst, best);
  }
  ok = ok && worst <= 1e-6;
  return {ok, std::to_string(img.roots.size()) + " roots, max distance to k pi " + num(worst)};
}

Verdict symmetry() {
  const auto img = classify_grid(kQuartic, method(Method::Bnqn), kGrid256);
  const int n = kGrid256.nx;
  std::vector<Label> perm(img.roots.size(), kUnresolved);
  for (std::size_t k = 0; k < img.roots.size(); ++k)
    for (std::size_t m = 0; m < img.roots.size(); ++m)
      if (std::abs(Complex(0, 1) * img.roots[k] - img.roots[m]) <= 1e-6) perm[k] = Label(m);
  auto boundary = [&](int i, int j) {
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int a = i + di[k], b = j + dj[k];
      if (a >= 0 && b >= 0 && a < n && b < n && img.at(a, b) != img.at(i, j)) return true;
    }
    return false;
  };
  int compared = 0, mismatched = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (boundary(i, j)) continue;
      const Label a = img.at(i, j);
      const Label expected = a >= 0 ? perm[a] : a;
      ++compared;
      mismatched += img.at(j, n - 1 - i) != expected;
    }
  }
  return {img.roots.size() == 4 && mismatched == 0,
          std::to_string(mismatched) + " mismatches over " + std::to_string(compared) + " non-boundary pixels"};
}

Verdict flow_invariant() {
  const FunctionSpec f = RootsProduct{{1.0, 2.0, -1.0, 7.0}, 1.0};
  FlowParams p;
  p.dt = 1e-3;
  p.t_max = 5.0;
  const Complex z0(4.0, 3.0);
  const Complex f0 = eval_jet<double>(f, z0).f;
  double worst = 0;
  for (const auto& s : newton_flow(f, z0, p))
    worst = std::max(worst, std::abs(std::exp(s.t) * eval_jet<double>(f, s.z).f / f0 - 1.0));
  return {worst <= 1e-5, "max |e^t f(z(t))/f(z0) - 1| = " + num(worst)};
}

Verdict smoothness() {
  const auto b = basin_stats(classify_grid(kQuartic, method(Method::Bnqn), kGrid256)).boundary_adjacency_count;
  const auto nw = basin_stats(classify_grid(kQuartic, method(Method::Newton), kGrid256)).boundary_adjacency_count;
  return {b < nw, "boundary adjacencies: bnqn " + std::to_string(b) + ", newton " + std::to_string(nw)};
}

Verdict oracle_suite() {
  gen::Rng rng(13);
  // Finite differences of F and of grad F.
  double grad_err = 0, hess_err = 0;
  for (int i = 0; i < 500; ++i) {
    const auto spec = gen::spec_of_kind(rng, i % 5);
    const Complex z = gen::point_away_from_poles(rng, spec, 2.0, 0.3);
    const auto jet = eval_jet<double>(spec, z);
    const auto g = grad_F(jet);
    if (g.norm() < 1e-6 * std::max(1.0, objective_value(jet))) continue;
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    auto F = [&](Complex p) { return objective_value(eval_jet<double>(spec, p)); };
    auto G = [&](Complex p) { return grad_F(eval_jet<double>(spec, p)); };
    const Vec2<double> fd((F(z + h) - F(z - h)) / (2 * h), (F(z + Complex(0, h)) - F(z - Complex(0, h))) / (2 * h));
    grad_err = std::max(grad_err, (fd - g).norm() / g.norm());
    const Vec2<double> gx = (G(z + h) - G(z - h)) / (2 * h);
    const Vec2<double> gy = (G(z + Complex(0, h)) - G(z - Complex(0, h))) / (2 * h);
    const auto H = hess_F(jet);
    const double scale = std::max({std::abs(H.a11), std::abs(H.a12), std::abs(H.a22)});
    hess_err = std::max(hess_err, std::max({std::abs(gx.x() - H.a11), std::abs(0.5 * (gx.y() + gy.x()) - H.a12),
                                            std::abs(gy.y() - H.a22)}) /
                                      scale);
  }
  // Full steps against the numeric-differentiation reimplementation.
  double step_err = 0;
  int pairs = 0, decision_mismatch = 0;
  while (pairs < 100) {
    const auto spec = gen::spec_of_kind(rng, pairs % 5);
    const Complex z = gen::point_away_from_poles(rng, spec, 2.0, 0.3);
    StepRecord<double> rec;
    try {
      rec = bnqn_step<double>(z, spec, BnqnParams{});
    } catch (const Error&) {
      continue;
    }
    const auto ref = oracle::reference_step(spec, z, oracle::RefParams{}, 1e-3 * std::max(1.0, std::abs(z)));
    decision_mismatch += ref.delta_index != rec.delta_index || ref.gamma != rec.gamma;
    step_err = std::max(step_err, std::abs(ref.next - rec.next) / std::max(1.0, std::abs(rec.next)));
    ++pairs;
  }
  const bool ok = grad_err <= 1e-5 && hess_err <= 1e-4 && step_err <= 1e-8;
  return {ok, "grad FD err " + num(grad_err) + ", Hessian FD err " + num(hess_err) + ", step err " + num(step_err) +
                  " over " + std::to_string(pairs) + " pairs (" + std::to_string(decision_mismatch) +
                  " delta/gamma mismatches)"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "BNQN rate at multiple roots", 1.0, bnqn_rate},
      {2, "Newton rate at multiple roots", 1.0, newton_rate},
      {3, "linearization rays", 1.0, linearization_rays},
      {4, "conjugacy invariance", 5.0, conjugacy},
      {5, "local saddle regime", 1.0, local_regime},
      {6, "repulsion bound", 1.0, repulsion},
      {7, "M-bound sweep", 1.0, m_bound},
      {8, "basin coverage", 60.0, coverage},
      {9, "root census", 60.0, root_census},
      {10, "rotation symmetry", 60.0, symmetry},
      {11, "Newton-flow invariant", 1.0, flow_invariant},
      {12, "smoothness proxy", 120.0, smoothness},
      {13, "oracle suite", 10.0, oracle_suite},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = c.run();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < c.time_limit;
  const bool pass = v.pass && in_time;
  while (v.detail.size() >= 2 && v.detail.compare(v.detail.size() - 2, 2, "; ") == 0) v.detail.resize(v.detail.size() - 2);
  std::printf("criterion %2d %-30s %s  %s; %.3fs (limit %gs)\n", c.id, c.name, pass ? "PASS" : "FAIL",
              v.detail.c_str(), secs, c.time_limit);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  bool all = true;
  if (argc > 1) {
    const int id = std::atoi(argv[1]);
    for (const auto& c : criteria())
      if (c.id == id) return run_one(c) ? 0 : 1;
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  for (const auto& c : criteria()) all = run_one(c) && all;
  return all ? 0 : 1;
}
