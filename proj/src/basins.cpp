#include "bnqn/basins.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "bnqn/error.hpp"

namespace bnqn {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

bool less_re_im(Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); }

Label label_for(const RunOutcome& out, const std::vector<Complex>& roots) {
  switch (out.kind) {
    case OutcomeKind::ConvergedToRoot: {
      Label best = kUnresolved;
      double best_dist = kMatchRadius;
      for (std::size_t k = 0; k < roots.size(); ++k) {
        const double dist = std::abs(out.point - roots[k]);
        if (dist <= best_dist) {
          best_dist = dist;
          best = static_cast<Label>(k);
        }
      }
      return best;
    }
    case OutcomeKind::ConvergedToCritical: return kCritical;
    case OutcomeKind::Diverged:
    case OutcomeKind::PoleHit: return kDiverged;
    case OutcomeKind::MaxIterReached: return kUnresolved;
  }
  return kUnresolved;
}

}  // namespace

void validate(const GridSpec& g) {
  require(std::isfinite(g.center.real()) && std::isfinite(g.center.imag()), "center: must be finite");
  require(std::isfinite(g.half_width) && g.half_width > 0.0, "half_width: must be positive");
  require(std::isfinite(g.half_height) && g.half_height > 0.0, "half_height: must be positive");
  require(g.nx >= 1, "nx: must be >= 1");
  require(g.ny >= 1, "ny: must be >= 1");
}

std::string label_name(Label label) {
  switch (label) {
    case kCritical: return "Critical";
    case kDiverged: return "Diverged";
    case kUnresolved: return "Unresolved";
    default: return "RootIndex(" + std::to_string(label) + ")";
  }
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Bnqn: return "bnqn";
    case Method::Newton: return "newton";
    case Method::Relaxed: return "relaxed";
    case Method::RandomRelaxed: return "random_relaxed";
    case Method::NewtonOpt: return "newton_opt";
    case Method::Flow: return "flow";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Bnqn, Method::Newton, Method::Relaxed, Method::RandomRelaxed, Method::NewtonOpt,
                   Method::Flow})
    if (name == to_string(m)) return m;
  throw Error(ErrorCode::InvalidArgument, "method: unknown selector '" + name + "'");
}

void validate(const MethodConfig& cfg) {
  validate(cfg.bnqn);
  require(cfg.relaxed_gamma != Complex(0), "gamma: must be nonzero");
  require(cfg.random_radius > 0.0 && cfg.random_radius < 1.0, "radius: must lie in (0, 1)");
  require(cfg.flow.dt > 0.0 && cfg.flow.dt <= cfg.flow.t_max, "dt: must satisfy 0 < dt <= t_max");
}

RunOutcome run_method(const FunctionSpec& spec, const MethodConfig& cfg, Complex z0, std::uint64_t stream) {
  const StopRule& stop = cfg.bnqn.stop;
  const JetOptions& jet = cfg.bnqn.jet;
  switch (cfg.method) {
    case Method::Bnqn: return run<double>(z0, spec, cfg.bnqn, false).outcome;
    case Method::Newton: return run_relaxed(spec, z0, 1.0, stop, jet);
    case Method::Relaxed: return run_relaxed(spec, z0, cfg.relaxed_gamma, stop, jet);
    case Method::RandomRelaxed: {
      RandomRelaxedState state{cfg.seed ^ (stream * 0x9e3779b97f4a7c15ULL), 0, cfg.random_radius};
      return run_random_relaxed(spec, z0, state, stop, jet);
    }
    case Method::NewtonOpt: return run_newton_opt(spec, z0, stop, jet);
    case Method::Flow: return run_flow(spec, z0, cfg.flow, stop, jet);
  }
  throw Error(ErrorCode::InvalidArgument, "method: unknown selector");
}

std::vector<Complex> cluster_points(std::vector<Complex> points, double eps) {
  std::sort(points.begin(), points.end(), less_re_im);
  std::vector<Complex> reps;
  for (Complex p : points) {
    const bool known = std::any_of(reps.begin(), reps.end(), [&](Complex r) { return std::abs(p - r) <= eps; });
    if (!known) reps.push_back(p);
  }
  std::sort(reps.begin(), reps.end(), less_re_im);
  return reps;
}

BasinImage classify_grid(const FunctionSpec& spec, const MethodConfig& cfg, const GridSpec& grid,
                         const std::optional<std::vector<Complex>>& roots, int threads) {
  validate(grid);
  const std::size_t n = grid.size();
  std::vector<RunOutcome> outcomes(n);

  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int j = next_row++; j < grid.ny; j = next_row++) {
      for (int i = 0; i < grid.nx; ++i) {
        const std::size_t idx = std::size_t(j) * grid.nx + i;
        try {
          outcomes[idx] = run_method(spec, cfg, grid.pixel(i, j), idx);
        } catch (const std::exception&) {
          outcomes[idx] = {OutcomeKind::MaxIterReached, grid.pixel(i, j), 0};
        }
      }
    }
  };
  const int nthreads = std::clamp(threads, 1, std::max(1, grid.ny));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BasinImage image;
  image.grid = grid;
  if (roots) {
    image.roots = *roots;
  } else {
    std::vector<Complex> ends;
    for (const auto& o : outcomes)
      if (o.kind == OutcomeKind::ConvergedToRoot) ends.push_back(o.point);
    image.roots = cluster_points(std::move(ends));
  }
  image.labels.resize(n);
  image.iters.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    image.labels[k] = label_for(outcomes[k], image.roots);
    image.iters[k] = outcomes[k].iters;
  }
  return image;
}

BasinImage voronoi_raster(const std::vector<Complex>& sites, const GridSpec& grid) {
  if (sites.empty()) throw Error(ErrorCode::EmptySites, "sites: must be nonempty");
  validate(grid);
  BasinImage image;
  image.grid = grid;
  image.roots = sites;
  image.labels.resize(grid.size());
  image.iters.assign(grid.size(), 0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Complex z = grid.pixel(i, j);
      Label best = 0;
      double best_d2 = std::norm(z - sites[0]);
      for (std::size_t k = 1; k < sites.size(); ++k) {
        const double d2 = std::norm(z - sites[k]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = static_cast<Label>(k);
        }
      }
      image.labels[std::size_t(j) * grid.nx + i] = best;
    }
  }
  return image;
}

const std::vector<Rgb>& default_palette() {
  static const std::vector<Rgb> palette{
      {{31, 119, 180}},  {{255, 127, 14}}, {{44, 160, 44}},  {{214, 39, 40}},
      {{148, 103, 189}}, {{140, 86, 75}},  {{227, 119, 194}}, {{127, 127, 127}},
      {{188, 189, 34}},  {{23, 190, 207}}, {{255, 215, 0}},   {{0, 128, 128}},
  };
  return palette;
}

std::string render_ppm(const BasinImage& image, const std::vector<Rgb>& palette) {
  Label max_label = -1;
  for (Label l : image.labels) max_label = std::max(max_label, l);
  const std::size_t needed = std::max<std::size_t>(image.roots.size(), std::size_t(max_label + 1));
  if (palette.size() < needed)
    throw Error(ErrorCode::PaletteTooSmall,
                "palette: " + std::to_string(palette.size()) + " colours for " + std::to_string(needed) + " roots");

  std::string out = "P6\n" + std::to_string(image.grid.nx) + " " + std::to_string(image.grid.ny) + "\n255\n";
  out.reserve(out.size() + 3 * image.labels.size());
  for (Label l : image.labels) {
    Rgb c{0, 0, 0};
    if (l >= 0)
      c = palette[std::size_t(l)];
    else if (l == kCritical)
      c = {255, 255, 255};
    out.append(reinterpret_cast<const char*>(c.data()), 3);
  }
  return out;
}

BasinStats basin_stats(const BasinImage& image) {
  BasinStats s;
  const auto& g = image.grid;
  const double total = double(image.labels.size());
  s.per_root_fraction.assign(image.roots.size(), 0.0);
  std::size_t rooted = 0, unresolved = 0, critical = 0, diverged = 0;
  for (Label l : image.labels) {
    if (l >= 0) {
      ++rooted;
      if (std::size_t(l) < s.per_root_fraction.size()) s.per_root_fraction[std::size_t(l)] += 1.0;
    } else if (l == kUnresolved) {
      ++unresolved;
    } else if (l == kCritical) {
      ++critical;
    } else {
      ++diverged;
    }
  }
  if (total > 0) {
    s.coverage = rooted / total;
    s.unresolved_fraction = unresolved / total;
    s.critical_fraction = critical / total;
    s.diverged_fraction = diverged / total;
    for (double& f : s.per_root_fraction) f /= total;
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx && image.at(i, j) != image.at(i + 1, j)) ++s.boundary_adjacency_count;
      if (j + 1 < g.ny && image.at(i, j) != image.at(i, j + 1)) ++s.boundary_adjacency_count;
    }
  }
  return s;
}

}  // namespace bnqn
