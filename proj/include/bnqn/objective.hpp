#pragma once

// The real objective F(x, y) = |f(x + iy)|^2 / 2 with closed-form gradient and Hessian.

#include <cmath>
#include <complex>

#include "bnqn/jet.hpp"
#include "bnqn/linalg2.hpp"

namespace bnqn {

template <typename Scalar = double>
struct GradHess {
  Vec2<Scalar> grad;
  Sym2<Scalar> hess;
  Scalar fval{0};
};

/// Eight real partials of f = u + iv, recovered from f' and f'' by Cauchy-Riemann.
template <typename Scalar>
struct RealPartials {
  Scalar u, v;
  Scalar ux, uy, vx, vy;
  Scalar uxx, uxy, uyy, vxx, vxy, vyy;
};

template <typename Scalar>
RealPartials<Scalar> real_partials(const Jet2<Scalar>& jet) {
  RealPartials<Scalar> p;
  p.u = jet.f.real();
  p.v = jet.f.imag();
  // f' = u_x + i v_x, u_y = -v_x, v_y = u_x
  p.ux = jet.df.real();
  p.vx = jet.df.imag();
  p.uy = -p.vx;
  p.vy = p.ux;
  // f'' = u_xx + i v_xx, u_xy = -v_xx, v_xy = u_xx, and harmonicity
  p.uxx = jet.d2f.real();
  p.vxx = jet.d2f.imag();
  p.uxy = -p.vxx;
  p.vxy = p.uxx;
  p.uyy = -p.uxx;
  p.vyy = -p.vxx;
  return p;
}

template <typename Scalar>
Scalar objective_value(const Jet2<Scalar>& jet) {
  return std::norm(jet.f) / 2;
}

/// grad F = (Re, Im) of f * conj(f').
template <typename Scalar>
Vec2<Scalar> grad_F(const Jet2<Scalar>& jet) {
  const std::complex<Scalar> g = jet.f * std::conj(jet.df);
  return {g.real(), g.imag()};
}

/// Hessian of F from the real partials: [u u_xx + v v_xx + u_x^2 + v_x^2, ...].
template <typename Scalar>
Sym2<Scalar> hess_F(const Jet2<Scalar>& jet) {
  const auto p = real_partials(jet);
  Sym2<Scalar> h;
  h.a11 = p.u * p.uxx + p.v * p.vxx + p.ux * p.ux + p.vx * p.vx;
  h.a12 = p.u * p.uxy + p.v * p.vxy + p.ux * p.uy + p.vx * p.vy;
  h.a22 = p.u * p.uyy + p.v * p.vyy + p.uy * p.uy + p.vy * p.vy;
  return h;
}

template <typename Scalar>
GradHess<Scalar> grad_hess(const Jet2<Scalar>& jet) {
  return {grad_F(jet), hess_F(jet), objective_value(jet)};
}

template <typename Scalar = double>
GradHess<Scalar> evaluate_objective(const FunctionSpec& spec, std::complex<Scalar> z,
                                    const JetOptions& opt = {}) {
  return grad_hess(eval_jet<Scalar>(spec, z, opt));
}

struct ClassifyTol {
  double root = 1e-8;
  double crit = 1e-8;
};

enum class PointClass { Root, CriticalNotRoot, Pole, Regular };

const char* to_string(PointClass c);

/// Root if |f| <= tol.root, CriticalNotRoot if |f'| <= tol.crit, Pole if evaluation hits one.
template <typename Scalar = double>
PointClass classify_point(const FunctionSpec& spec, std::complex<Scalar> z, const ClassifyTol& tol = {},
                          const JetOptions& opt = {}) {
  Jet2<Scalar> jet;
  try {
    jet = eval_jet<Scalar>(spec, z, opt);
  } catch (const PoleError&) {
    return PointClass::Pole;
  }
  if (std::abs(jet.f) <= Scalar(tol.root)) return PointClass::Root;
  if (std::abs(jet.df) <= Scalar(tol.crit)) return PointClass::CriticalNotRoot;
  return PointClass::Regular;
}

inline const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::Root: return "Root";
    case PointClass::CriticalNotRoot: return "CriticalNotRoot";
    case PointClass::Pole: return "Pole";
    case PointClass::Regular: return "Regular";
  }
  return "Unknown";
}

}  // namespace bnqn
