#include "bnqn/bnqn.hpp"

#include <cmath>
#include <string>

#include "bnqn/error.hpp"

namespace bnqn {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

}  // namespace

void validate(const BnqnParams& p) {
  for (double d : p.deltas) require(std::isfinite(d), "deltas: entries must be finite");
  for (std::size_t i = 0; i < p.deltas.size(); ++i)
    for (std::size_t j = i + 1; j < p.deltas.size(); ++j)
      require(p.deltas[i] != p.deltas[j], "deltas: entries must be pairwise distinct");
  require(p.tau > 0 && p.tau % 2 == 0, "tau: must be a positive even integer");
  require(std::isfinite(p.theta) && p.theta >= 0.0, "theta: must be >= 0");
  require(p.gamma0 > 0.0 && p.gamma0 <= 1.0, "gamma0: must lie in (0, 1]");
  require(p.backoff > 0.0 && p.backoff < 1.0, "backoff: must lie in (0, 1)");
  require(p.armijo_c > 0.0 && p.armijo_c < 1.0, "armijo_c: must lie in (0, 1)");
  require(p.max_armijo >= 1, "max_armijo: must be >= 1");
  require(p.stop.grad_tol >= 0.0, "grad_tol: must be >= 0");
  require(p.stop.root_tol >= 0.0, "root_tol: must be >= 0");
  require(p.stop.crit_tol >= 0.0, "crit_tol: must be >= 0");
  require(p.stop.escape_radius > 0.0, "escape_radius: must be positive");
  require(p.stop.max_iter >= 0, "max_iter: must be >= 0");
}

BnqnParams conjugate_params(const BnqnParams& params, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c: must be positive");
  BnqnParams out = params;
  const double factor = std::pow(c, 2 - params.tau);
  for (double& d : out.deltas) d *= factor;
  out.theta = params.theta * c;
  return out;
}

ConjugacyReport conjugacy_check(const FunctionSpec& spec, const BnqnParams& params, double c, double angle,
                                std::span<const Complex> starts, int steps, double tol) {
  const Complex a = std::polar(c, angle);
  const FunctionSpec moved = scale_argument(spec, a);
  const BnqnParams moved_params = conjugate_params(params, c);
  ConjugacyReport rep{c, angle, steps, static_cast<int>(starts.size()), 0.0, tol};
  // An orbit that stops early (fixed point or exhausted line search) stays at its last point.
  auto padded = [steps](std::vector<Complex> pts) {
    pts.resize(std::size_t(steps) + 1, pts.back());
    return pts;
  };
  for (Complex z0 : starts) {
    const auto zs = padded(orbit<double>(z0, spec, params, steps));
    const auto ws = padded(orbit<double>(z0 / a, moved, moved_params, steps));
    for (std::size_t n = 0; n < zs.size(); ++n)
      rep.max_rel_err = std::max(rep.max_rel_err, std::abs(ws[n] - zs[n] / a) / (1.0 + std::abs(zs[n])));
  }
  return rep;
}

}  // namespace bnqn
