#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bnqn/baselines.hpp"
#include "bnqn/localdyn.hpp"
#include "support/generators.hpp"

using namespace bnqn;

namespace {

constexpr double kPi = std::numbers::pi;

FunctionSpec one_plus_power(int d, Complex a0 = 1.0, Complex ad = 1.0) {
  std::vector<Complex> c(d + 1, 0.0);
  c[0] = a0;
  c[d] = ad;
  return Coeffs{c};
}

}  // namespace

TEST_CASE("arg_0_2pi") {
  CHECK(arg_0_2pi(Complex(1.0)) == doctest::Approx(2 * kPi));
  CHECK(arg_0_2pi(Complex(0.0, 1.0)) == doctest::Approx(kPi / 2));
  CHECK(arg_0_2pi(Complex(-1.0)) == doctest::Approx(kPi));
  CHECK(arg_0_2pi(Complex(0.0, -1.0)) == doctest::Approx(1.5 * kPi));
}

TEST_CASE("phi1 examples") {
  CHECK(phi1(Complex(0.0), 3) == Complex(0.0));
  CHECK(std::abs(phi1(Complex(1.0, 1.0), 2) - Complex(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(phi1(Complex(0.5), 3) - Complex(0.25)) < 1e-15);
  CHECK_THROWS_AS(phi1(Complex(1.0), 1), Error);
}

TEST_CASE("ray multipliers alternate between stable and unstable") {
  const auto s = ray_multiplier(3, 0);
  CHECK(s.multiplier == doctest::Approx(0.5));
  CHECK(s.kind == RayKind::Stable);
  const auto u = ray_multiplier(3, 1);
  CHECK(u.multiplier == doctest::Approx(1.5));
  CHECK(u.kind == RayKind::Unstable);
  CHECK(ray_multiplier(2, 0).multiplier == 0.0);
  CHECK(ray_multiplier(2, 3).multiplier == 2.0);
}

TEST_CASE("property: phi1 fixes only the origin") {
  gen::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const int d = rng.integer(2, 9);
    const Complex z = rng.in_disc(3.0);
    CHECK(std::abs(phi1(z, d) - z) == doctest::Approx(std::abs(z) / (d - 1)).epsilon(1e-12));
  }
}

TEST_CASE("property: phi1 maps each ray to itself with the predicted multiplier") {
  gen::Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const int d = rng.integer(2, 9);
    const int j = rng.integer(0, 2 * d - 1);
    const Complex e = std::polar(1.0, kPi * j / d);
    const double r = std::pow(10.0, rng.uniform(-8, 2));
    const Complex img = phi1(r * e, d);
    CHECK(std::abs(img - ray_multiplier(d, j).multiplier * r * e) <= 1e-12 * r);
  }
}

TEST_CASE("property: phi1 commutes with positive scaling, rotation by 2pi/d and conjugation") {
  gen::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const int d = rng.integer(2, 9);
    const Complex z = rng.in_disc(2.0);
    const double t = rng.uniform(0.01, 100.0);
    const Complex w = std::polar(1.0, 2 * kPi / d);
    const double tol = 1e-12 * (1 + std::abs(z));
    CHECK(std::abs(phi1(t * z, d) - t * phi1(z, d)) <= tol * t);
    CHECK(std::abs(phi1(w * z, d) - w * phi1(z, d)) <= tol);
    CHECK(std::abs(phi1(std::conj(z), d) - std::conj(phi1(z, d))) <= tol);
  }
}

TEST_CASE("sector probe leaves the disc from a generic start") {
  const auto res = sector_probe_phi1(std::polar(0.1, 0.3), 3, 200);
  CHECK(res.final_classification == SaddleClass::LeftDisc);
  REQUIRE(res.exit_step.has_value());
  CHECK(*res.exit_step > 0);
  CHECK(res.sector_invariant);
  CHECK(res.monotone);
  CHECK(res.angle_sequence.size() == std::size_t(*res.exit_step) + 1);
}

TEST_CASE("sector probe on a stable ray converges to the critical point") {
  const auto res = sector_probe_phi1(Complex(0.1), 2, 50);
  CHECK(res.final_classification == SaddleClass::ConvergedToCritical);
  CHECK_FALSE(res.exit_step.has_value());
  const auto res3 = sector_probe_phi1(Complex(0.1), 3, 200);
  CHECK(res3.final_classification == SaddleClass::ConvergedToCritical);
}

TEST_CASE("property: sector probes from random generic starts escape monotonically") {
  gen::Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const int d = rng.integer(2, 7);
    const Complex z0 = std::polar(rng.uniform(1e-3, 0.5), rng.uniform(0.0, 2 * kPi));
    const auto res = sector_probe_phi1(z0, d, 2000);
    CAPTURE(d);
    CAPTURE(z0);
    CHECK(res.final_classification == SaddleClass::LeftDisc);
    CHECK(res.sector_invariant);
    CHECK(res.monotone);
  }
}

TEST_CASE("taylor_coefficients and local_model") {
  const auto c = taylor_coefficients(ExpAffine{1.0, 0.0}, Complex(0.0), 5, 0.5);
  double fact = 1;
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) fact *= k;
    CHECK(std::abs(c[k] - 1.0 / fact) < 1e-12);
  }
  const auto m = local_model(Coeffs{{1.0, 0.0, 0.0, 0.0, -1.0}}, Complex(0.0));
  CHECK(m.d == 4);
  CHECK(std::abs(m.a0 - 1.0) < 1e-12);
  CHECK(std::abs(m.ad + 1.0) < 1e-10);
  CHECK(std::abs(std::remainder(m.phase - kPi, 2 * kPi)) < 1e-9);

  // f = (z - 1)^3 + 2 has a double critical point at 1.
  const auto s = local_model(Rational{RootsProduct{{1.0, 1.0, 1.0}, 1.0}, Coeffs{{1.0}}}, Complex(1.0));
  CHECK(s.d == 3);
  CHECK(nearest_special_distance(Coeffs{{1.0, 0.0, 0.0, 0.0, -1.0}}, Complex(0.0)) == doctest::Approx(1.0));
}

TEST_CASE("repulsion_sector_half_width") {
  CHECK(repulsion_sector_half_width(3) == doctest::Approx(0.4182).epsilon(1e-3));
  CHECK(repulsion_sector_half_width(2) == doctest::Approx(std::acos(0.125) / 2));
  CHECK_THROWS_AS(repulsion_sector_half_width(1), Error);
}

TEST_CASE("local probe at the critical point of 1 + z^2") {
  const auto rep = bnqn_local_probe(one_plus_power(2), Complex(0.0), BnqnParams{});
  CHECK(rep.pass());
  CHECK(rep.model.d == 2);
  CHECK(rep.d_estimate == doctest::Approx(2.0).epsilon(1e-3));
  // Unstable directions are the imaginary axis: steps there grow the modulus.
  for (const auto& s : rep.samples) {
    if (std::abs(std::cos(s.angle)) < 1e-9) CHECK(s.modulus_ratio > 1.0);
    CHECK(s.delta_index == 0);
    CHECK_FALSE(s.capped);
  }
  CHECK(rep.samples.size() == 360);
  CHECK_NOTHROW(require_pass(rep));
}

TEST_CASE("local probe at each critical point of a quartic with distinct roots") {
  const FunctionSpec f = RootsProduct{{-2.0, 5.0, Complex(1, 4), 0.0}, 1.0};
  const auto crit = known_critical_points(f);
  REQUIRE(crit.size() == 3);
  for (Complex c : crit) {
    LocalProbeOptions opt;
    opt.samples = 90;
    const auto rep = bnqn_local_probe(f, c, BnqnParams{}, opt);
    CAPTURE(c);
    for (const auto& msg : rep.failures) MESSAGE(msg);
    CHECK(rep.pass());
    CHECK(rep.model.d == 2);
  }
}

TEST_CASE("local probe with a deliberately wide repulsion sector fails and says so") {
  LocalProbeOptions opt;
  opt.repulsion_half_width = kPi / 6;
  const auto rep = bnqn_local_probe(one_plus_power(3), Complex(0.0), BnqnParams{}, opt);
  CHECK_FALSE(rep.pass());
  CHECK(rep.min_repulsion_ratio < rep.repulsion_bound);
  CHECK_THROWS_AS(require_pass(rep), Error);
}

TEST_CASE("property: BNQN steps near a saddle of a0 + ad z^d grow the modulus inside the repulsion sector") {
  gen::Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const int d = rng.integer(2, 5);
    const Complex a0 = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * kPi));
    const Complex ad = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * kPi));
    const FunctionSpec f = one_plus_power(d, a0, ad);
    const double phase = std::arg(std::conj(a0) * ad);
    const double width = 0.9 * repulsion_sector_half_width(d);
    const double bound = (2.0 * d - 1) / (2.0 * d - 2);
    const double r = 1e-3;
    for (int k = 0; k < 10; ++k) {
      const int j = rng.integer(0, d - 1);
      const double ray = (kPi - phase + 2 * kPi * j) / d;
      const Complex z = std::polar(r, ray + rng.uniform(-width, width));
      const double ratio = std::abs(bnqn_step<double>(z, f, BnqnParams{}).next) / r;
      CAPTURE(d);
      CHECK(ratio >= bound * (1 - 1e-3));
    }
  }
}

TEST_CASE("modulus growth falls below (2d-1)/(2d-2) at angular offset pi/(2d) for d = 3") {
  const double r = 1e-3;
  const Complex z = std::polar(r, kPi / 3 + kPi / 6);
  const double ratio = std::abs(bnqn_step<double>(z, one_plus_power(3), BnqnParams{}).next) / r;
  CHECK(ratio == doctest::Approx(1.118).epsilon(2e-3));
  CHECK(ratio < 1.25);
}

TEST_CASE("contraction_rate") {
  std::vector<Complex> geo;
  for (int n = 0; n < 40; ++n) geo.push_back(Complex(0.3, 0.1) * std::pow(0.5, n));
  const auto g = contraction_rate(geo, 0.0);
  CHECK(g.ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(g.superlinear);

  const std::vector<Complex> hit{Complex(1.0), Complex(0.0), Complex(0.0)};
  CHECK(contraction_rate(hit, 0.0).superlinear);

  std::vector<Complex> quad{Complex(0.5)};
  for (int n = 0; n < 4; ++n) quad.push_back(quad.back() * quad.back());
  CHECK(contraction_rate(quad, 0.0, 3).superlinear);

  const std::vector<Complex> few{Complex(1.0), Complex(0.5)};
  CHECK_THROWS_AS(contraction_rate(few, 0.0), Error);
}

TEST_CASE("BNQN converges to a multiple root at rate (2d-2)/(2d-1) and Newton at (d-1)/d") {
  for (int d = 2; d <= 4; ++d) {
    std::vector<Complex> c(d + 1, 0.0);
    c[d] = 1.0;
    const FunctionSpec f = Coeffs{c};
    const auto pts = orbit<double>(Complex(0.3, 0.2), f, BnqnParams{}, 60);
    const auto b = contraction_rate(pts, 0.0);
    CHECK(b.ratio == doctest::Approx(double(2 * d - 2) / (2 * d - 1)).epsilon(1e-6));
    const auto n = contraction_rate(newton_iterates(f, Complex(0.3, 0.2), 60), 0.0);
    CHECK(n.ratio == doctest::Approx(double(d - 1) / d).epsilon(1e-9));
  }
}

TEST_CASE("m_value and its sweep") {
  CHECK(m_value(0.0, 3) == doctest::Approx(1.25));
  CHECK(m_value(kPi, 2) == doctest::Approx(1.0 / 6));
  CHECK(m_value(0.0, 2) == doctest::Approx(7.0 / 6));
  CHECK_THROWS_AS(m_value(0.0, 1), Error);
  const auto sweep = m_bound_sweep(2, 20, 10000);
  CHECK(sweep.min > 0.1);
  CHECK(sweep.min == doctest::Approx(1.0 / 6).epsilon(1e-6));
  CHECK(sweep.argmin_d == 2);
  CHECK_THROWS_AS(m_bound_sweep(1, 3, 10), Error);
}
