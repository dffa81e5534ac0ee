#pragma once

// Closed-form eigen machinery for real symmetric 2x2 matrices.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "bnqn/error.hpp"

namespace bnqn {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Symmetric matrix [[a11, a12], [a12, a22]]; symmetry is structural.
template <typename Scalar = double>
struct Sym2 {
  Scalar a11{0};
  Scalar a12{0};
  Scalar a22{0};

  static Sym2 identity() { return {Scalar(1), Scalar(0), Scalar(1)}; }
  static Sym2 diag(Scalar d1, Scalar d2) { return {d1, Scalar(0), d2}; }

  Eigen::Matrix<Scalar, 2, 2> dense() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << a11, a12, a12, a22;
    return m;
  }

  Vec2<Scalar> operator*(const Vec2<Scalar>& v) const {
    return {a11 * v.x() + a12 * v.y(), a12 * v.x() + a22 * v.y()};
  }

  /// this + shift * Id
  Sym2 shifted(Scalar shift) const { return {a11 + shift, a12, a22 + shift}; }

  Scalar trace() const { return a11 + a22; }
  Scalar det() const { return a11 * a22 - a12 * a12; }
};

/// Eigen decomposition ordered so that |lam1| >= |lam2|; e1, e2 orthonormal.
template <typename Scalar = double>
struct EigenPair2 {
  Scalar lam1{0};
  Scalar lam2{0};
  Vec2<Scalar> e1{Vec2<Scalar>::UnitX()};
  Vec2<Scalar> e2{Vec2<Scalar>::UnitY()};
};

namespace detail {

// Unit null direction of (A - lam Id), taken from the row with larger norm.
template <typename Scalar>
Vec2<Scalar> null_direction(const Sym2<Scalar>& a, Scalar lam) {
  const Vec2<Scalar> r1(a.a11 - lam, a.a12);
  const Vec2<Scalar> r2(a.a12, a.a22 - lam);
  const Vec2<Scalar>& row = r1.squaredNorm() >= r2.squaredNorm() ? r1 : r2;
  Vec2<Scalar> e(-row.y(), row.x());
  return e / e.norm();
}

}  // namespace detail

/**
 * Closed-form eigensolve.
 *
 * The eigenvalues are t/2 +- sqrt(((a11-a22)/2)^2 + a12^2), the trace/determinant
 * formula with the discriminant written as a sum of squares (so it can never go
 * negative). The smaller-magnitude eigenvalue is recovered from det/lam_big.
 * When the two eigenvalues coincide the coordinate axes are returned as
 * eigenvectors.
 */
template <typename Scalar>
EigenPair2<Scalar> eigen_sym2(const Sym2<Scalar>& a) {
  using std::abs;
  using std::hypot;
  const Scalar half_trace = (a.a11 + a.a22) / 2;
  const Scalar radius = hypot((a.a11 - a.a22) / 2, a.a12);
  const Scalar scale = std::max({abs(a.a11), abs(a.a12), abs(a.a22)});

  EigenPair2<Scalar> out;
  if (scale == Scalar(0)) return out;

  if (radius <= std::numeric_limits<Scalar>::epsilon() * scale) {
    // Degenerate spectrum: any orthonormal basis diagonalises A.
    out.lam1 = half_trace;
    out.lam2 = half_trace;
    return out;
  }

  const Scalar big = half_trace >= Scalar(0) ? half_trace + radius : half_trace - radius;
  // det / big, arranged as in LAPACK's dlaev2 to limit cancellation.
  const bool first_larger = abs(a.a11) > abs(a.a22);
  const Scalar acmx = first_larger ? a.a11 : a.a22;
  const Scalar acmn = first_larger ? a.a22 : a.a11;
  const Scalar small = (acmx / big) * acmn - (a.a12 / big) * a.a12;

  out.lam1 = big;
  out.lam2 = small;
  out.e1 = detail::null_direction(a, big);
  out.e2 = Vec2<Scalar>(out.e1.y(), -out.e1.x());
  return out;
}

/// Spectral radius: max |lambda|.
template <typename Scalar>
Scalar sp(const Sym2<Scalar>& a) {
  const auto ep = eigen_sym2(a);
  using std::abs;
  return std::max(abs(ep.lam1), abs(ep.lam2));
}

/// min |lambda|; zero exactly when A is singular.
template <typename Scalar>
Scalar minsp(const Sym2<Scalar>& a) {
  const auto ep = eigen_sym2(a);
  using std::abs;
  return std::min(abs(ep.lam1), abs(ep.lam2));
}

template <typename Scalar>
struct SignedProjection {
  Vec2<Scalar> plus;
  Vec2<Scalar> minus;
};

/// Splits v into its components along the positive and negative eigenspaces of A.
template <typename Scalar>
SignedProjection<Scalar> project_signed(const Sym2<Scalar>& a, const Vec2<Scalar>& v) {
  const auto ep = eigen_sym2(a);
  if (ep.lam1 == Scalar(0) || ep.lam2 == Scalar(0))
    throw Error(ErrorCode::SingularMatrix, "project_signed on a singular matrix");

  SignedProjection<Scalar> out{Vec2<Scalar>::Zero(), Vec2<Scalar>::Zero()};
  const std::pair<Scalar, const Vec2<Scalar>*> parts[] = {{ep.lam1, &ep.e1}, {ep.lam2, &ep.e2}};
  for (const auto& [lam, e] : parts) {
    const Vec2<Scalar> component = e->dot(v) * (*e);
    (lam > Scalar(0) ? out.plus : out.minus) += component;
  }
  return out;
}

/// A^{-1} v through the eigen decomposition.
template <typename Scalar>
Vec2<Scalar> solve_sym2(const Sym2<Scalar>& a, const Vec2<Scalar>& v) {
  const auto ep = eigen_sym2(a);
  if (ep.lam1 == Scalar(0) || ep.lam2 == Scalar(0))
    throw Error(ErrorCode::SingularMatrix, "solve on a singular matrix");
  return (ep.e1.dot(v) / ep.lam1) * ep.e1 + (ep.e2.dot(v) / ep.lam2) * ep.e2;
}

}  // namespace bnqn
