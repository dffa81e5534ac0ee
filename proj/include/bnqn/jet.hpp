#pragma once

// Exact (f, f', f'') evaluation for every FunctionSpec variant.

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include "bnqn/error.hpp"
#include "bnqn/function_spec.hpp"

namespace bnqn {

struct JetOptions {
  double pole_eps = 1e-12;      // relative denominator magnitude treated as a pole
  double overflow_cap = 1e150;  // largest admissible magnitude of any intermediate
};

template <typename Scalar = double>
struct Jet2 {
  std::complex<Scalar> f;
  std::complex<Scalar> df;
  std::complex<Scalar> d2f;
};

namespace detail {

// Polynomial value and first three derivatives. scale[k] is the k-th derivative
// of the majorant sum |c_k| s^k (or |c| prod (s + |r_j|)) at s = |z|, which bounds
// the size of the terms summed into d[k]; pole tests are relative to it.
template <typename Scalar>
struct PolyJet {
  std::array<std::complex<Scalar>, 4> d{};
  std::array<Scalar, 4> scale{};
};

template <typename Scalar>
PolyJet<Scalar> poly_jet(const RootsProduct& p, std::complex<Scalar> z) {
  using C = std::complex<Scalar>;
  // Leibniz accumulation of prod (z - r): exact at the roots themselves.
  std::array<C, 4> d{C(1), C(0), C(0), C(0)};
  std::array<Scalar, 4> m{1, 0, 0, 0};
  const Scalar az = std::abs(z);
  for (const Complex& r : p.roots) {
    const C q = z - C(r);
    d[3] = d[3] * q + Scalar(3) * d[2];
    d[2] = d[2] * q + Scalar(2) * d[1];
    d[1] = d[1] * q + d[0];
    d[0] = d[0] * q;
    const Scalar mq = az + Scalar(std::abs(r));
    m[3] = m[3] * mq + Scalar(3) * m[2];
    m[2] = m[2] * mq + Scalar(2) * m[1];
    m[1] = m[1] * mq + m[0];
    m[0] = m[0] * mq;
  }
  const C c(p.leading);
  const Scalar ac = std::abs(c);
  PolyJet<Scalar> out;
  for (int k = 0; k < 4; ++k) {
    out.d[k] = c * d[k];
    out.scale[k] = ac * m[k];
  }
  return out;
}

template <typename Scalar>
PolyJet<Scalar> poly_jet(const Coeffs& p, std::complex<Scalar> z) {
  using C = std::complex<Scalar>;
  // Horner carrying derivatives; d[k] holds the k-th derivative / k!.
  std::array<C, 4> d{};
  std::array<Scalar, 4> m{};
  const Scalar az = std::abs(z);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    d[3] = d[3] * z + d[2];
    d[2] = d[2] * z + d[1];
    d[1] = d[1] * z + d[0];
    d[0] = d[0] * z + C(*it);
    m[3] = m[3] * az + m[2];
    m[2] = m[2] * az + m[1];
    m[1] = m[1] * az + m[0];
    m[0] = m[0] * az + Scalar(std::abs(*it));
  }
  PolyJet<Scalar> out;
  out.d = {d[0], d[1], Scalar(2) * d[2], Scalar(6) * d[3]};
  out.scale = {m[0], m[1], Scalar(2) * m[2], Scalar(6) * m[3]};
  return out;
}

template <typename Scalar>
PolyJet<Scalar> poly_jet(const Polynomial& p, std::complex<Scalar> z) {
  return std::visit([&](const auto& v) { return poly_jet<Scalar>(v, z); }, p);
}

template <typename Scalar>
void check_finite(std::complex<Scalar> v, const JetOptions& opt) {
  const Scalar m = std::abs(v);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || !(m <= Scalar(opt.overflow_cap)))
    throw Error(ErrorCode::Overflow, "magnitude exceeds overflow cap");
}

template <typename Scalar>
Jet2<Scalar> quotient_jet(const std::array<std::complex<Scalar>, 3>& n,
                          const std::array<std::complex<Scalar>, 3>& d, Scalar den_scale,
                          std::complex<Scalar> z, const JetOptions& opt) {
  if (!(std::abs(d[0]) > Scalar(opt.pole_eps) * den_scale))
    throw PoleError(Complex(double(z.real()), double(z.imag())));
  const auto inv = std::complex<Scalar>(1) / d[0];
  const auto f = n[0] * inv;
  const auto df = (n[1] - f * d[1]) * inv;
  const auto d2f = (n[2] - Scalar(2) * df * d[1] - f * d[2]) * inv;
  return {f, df, d2f};
}

}  // namespace detail

/**
 * Returns (f, f', f'') at z.
 *
 * Throws PoleError when a denominator is below pole_eps relative to its
 * magnitude scale and Error(Overflow) when any value exceeds overflow_cap.
 */
template <typename Scalar = double>
Jet2<Scalar> eval_jet(const FunctionSpec& spec, std::complex<Scalar> z, const JetOptions& opt = {}) {
  using C = std::complex<Scalar>;
  detail::check_finite(z, opt);
  const Jet2<Scalar> jet = std::visit(
      [&](const auto& v) -> Jet2<Scalar> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RootsProduct> || std::is_same_v<T, Coeffs>) {
          const auto pj = detail::poly_jet<Scalar>(v, z);
          return {pj.d[0], pj.d[1], pj.d[2]};
        } else if constexpr (std::is_same_v<T, Rational>) {
          const auto n = detail::poly_jet<Scalar>(v.num, z);
          const auto d = detail::poly_jet<Scalar>(v.den, z);
          for (const auto& x : n.d) detail::check_finite(x, opt);
          for (const auto& x : d.d) detail::check_finite(x, opt);
          return detail::quotient_jet<Scalar>({n.d[0], n.d[1], n.d[2]}, {d.d[0], d.d[1], d.d[2]},
                                              d.scale[0], z, opt);
        } else if constexpr (std::is_same_v<T, NewtonQuotient>) {
          const auto p = detail::poly_jet<Scalar>(v.p, z);
          for (const auto& x : p.d) detail::check_finite(x, opt);
          return detail::quotient_jet<Scalar>({p.d[0], p.d[1], p.d[2]}, {p.d[1], p.d[2], p.d[3]},
                                              p.scale[1], z, opt);
        } else {
          const C e = std::exp(C(v.a) * z);
          detail::check_finite(e, opt);
          const C a(v.a);
          return {e + C(v.b), a * e, a * a * e};
        }
      },
      spec);
  detail::check_finite(jet.f, opt);
  detail::check_finite(jet.df, opt);
  detail::check_finite(jet.d2f, opt);
  return jet;
}

}  // namespace bnqn
