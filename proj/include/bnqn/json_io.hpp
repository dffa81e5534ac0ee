#pragma once

// JSON encodings of specs, parameters, reports and the run configuration.
// Parse errors throw Error(InvalidArgument) with a message that starts with the
// dotted path of the offending field.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnqn/basins.hpp"
#include "bnqn/bnqn.hpp"
#include "bnqn/function_spec.hpp"
#include "bnqn/localdyn.hpp"

namespace bnqn {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& path);

Json to_json(const FunctionSpec& spec);
FunctionSpec function_from_json(const Json& j, const std::string& path = "function");

Json to_json(const BnqnParams& params);
BnqnParams bnqn_params_from_json(const Json& j, const std::string& path = "bnqn");

Json to_json(const GridSpec& grid);
GridSpec grid_from_json(const Json& j, const std::string& path = "grid");

Json to_json(const FlowParams& flow);
FlowParams flow_from_json(const Json& j, const std::string& path = "flow");

Json to_json(const RunOutcome& outcome);
Json to_json(const BasinStats& stats);
Json to_json(const LocalProbeReport& report);
Json to_json(const ConjugacyReport& report);

struct OutputPaths {
  std::string image_path{"basins.ppm"};
  std::string stats_path{"stats.json"};
  std::string trace_path{"trace.csv"};
};

struct RunConfig {
  FunctionSpec function{Coeffs{{1.0, 0.0, 0.0, 0.0, -1.0}}};
  std::string method{"bnqn"};
  BnqnParams bnqn{};
  Complex relaxed_gamma{1.0, 0.0};
  double random_radius{0.5};
  FlowParams flow{};
  GridSpec grid{{0.0, 0.0}, 2.0, 2.0, 512, 512};
  OutputPaths outputs{};
  std::uint64_t seed{0};
  int threads{1};

  // Per-subcommand sections.
  Complex z0{0.1, 0.0};
  std::optional<Complex> critical_point;  // local: default probes every critical point
  int local_samples{360};
  std::optional<double> local_r0;
  int rate_steps{200};
  std::optional<Complex> rate_limit;  // rate: default is the point the run converges to
  double conj_c{2.0};
  double conj_angle{1.0471975511965976};
  int conj_steps{50};
  std::vector<Complex> conj_starts{{0.3, 0.7}, {-1.2, 0.4}, {0.9, -0.8}};
  std::optional<std::vector<Complex>> voronoi_sites;  // default: zeros of f inside the grid
};

/// Throws Error(InvalidArgument) naming the offending field.
void validate(const RunConfig& cfg);

MethodConfig method_config(const RunConfig& cfg);

Json to_json(const RunConfig& cfg);
/// Accepts a config object, or any emitted artifact carrying one under "config".
RunConfig config_from_json(const Json& j);

/// Parses JSON text; syntax errors become Error(InvalidArgument) prefixed with `what`.
Json parse_json_text(const std::string& text, const std::string& what);

}  // namespace bnqn
