#pragma once

// Basins of attraction over a pixel grid, Voronoi rasters, PPM output and statistics.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnqn/baselines.hpp"
#include "bnqn/bnqn.hpp"
#include "bnqn/function_spec.hpp"

namespace bnqn {

struct GridSpec {
  Complex center{0.0, 0.0};
  double half_width{1.0};
  double half_height{1.0};
  int nx{1};
  int ny{1};

  /// Pixel centre; row 0 is the top row (largest imaginary part).
  Complex pixel(int i, int j) const {
    const double re = center.real() + ((i + 0.5) / nx - 0.5) * 2.0 * half_width;
    const double im = center.imag() + (0.5 - (j + 0.5) / ny) * 2.0 * half_height;
    return {re, im};
  }
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
};

void validate(const GridSpec& grid);

/// Pixel labels: k >= 0 is RootIndex(k).
using Label = std::int32_t;
inline constexpr Label kCritical = -1;
inline constexpr Label kDiverged = -2;
inline constexpr Label kUnresolved = -3;

std::string label_name(Label label);

struct BasinImage {
  GridSpec grid;
  std::vector<Label> labels;  // row-major, row 0 first
  std::vector<std::int32_t> iters;
  std::vector<Complex> roots;

  Label at(int i, int j) const { return labels[std::size_t(j) * grid.nx + i]; }
};

enum class Method { Bnqn, Newton, Relaxed, RandomRelaxed, NewtonOpt, Flow };

const char* to_string(Method m);
/// Parses a selector string; throws Error(InvalidArgument) naming "method".
Method parse_method(const std::string& name);

/// Everything needed to run one method from one starting point. Stopping
/// tolerances and jet options come from `bnqn.stop` and `bnqn.jet` for every method.
struct MethodConfig {
  Method method{Method::Bnqn};
  BnqnParams bnqn{};
  Complex relaxed_gamma{1.0, 0.0};
  double random_radius{0.5};
  std::uint64_t seed{0};
  FlowParams flow{};
};

void validate(const MethodConfig& cfg);

/// Runs the configured method from z0. `stream` selects the random stream for Random Relaxed.
RunOutcome run_method(const FunctionSpec& spec, const MethodConfig& cfg, Complex z0, std::uint64_t stream = 0);

inline constexpr double kMatchRadius = 1e-5;
inline constexpr double kClusterEps = 1e-5;

/// Groups points closer than eps; representatives come out sorted by (re, im).
std::vector<Complex> cluster_points(std::vector<Complex> points, double eps = kClusterEps);

/**
 * One run per pixel. Without `roots` the root table is discovered from the
 * ConvergedToRoot endpoints after all pixels finish, so the result does not
 * depend on evaluation order or on `threads`.
 */
BasinImage classify_grid(const FunctionSpec& spec, const MethodConfig& cfg, const GridSpec& grid,
                         const std::optional<std::vector<Complex>>& roots = std::nullopt, int threads = 1);

/// Nearest-site labels; ties go to the lowest site index.
BasinImage voronoi_raster(const std::vector<Complex>& sites, const GridSpec& grid);

using Rgb = std::array<std::uint8_t, 3>;

const std::vector<Rgb>& default_palette();

/// Binary P6 bytes.
std::string render_ppm(const BasinImage& image, const std::vector<Rgb>& palette = default_palette());

struct BasinStats {
  double coverage{0};
  std::vector<double> per_root_fraction;
  std::int64_t boundary_adjacency_count{0};
  double unresolved_fraction{0};
  double critical_fraction{0};
  double diverged_fraction{0};
};

BasinStats basin_stats(const BasinImage& image);

}  // namespace bnqn
