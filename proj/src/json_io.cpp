#include "bnqn/json_io.hpp"

#include <cmath>
#include <set>

#include "bnqn/error.hpp"

namespace bnqn {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, path + ": " + msg);
}

// what() without the leading error-code tag.
std::string message_of(const Error& e) {
  const std::string w = e.what();
  const auto pos = w.find(": ");
  return pos == std::string::npos ? w : w.substr(pos + 2);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Field access for one JSON object, rejecting keys that are not read.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(path(key), "missing field");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return (long long)v.get<double>();
      fail(path(key), "expected an integer");
    }
    return v.get<long long>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
  }

  Complex complex(const std::string& key, Complex fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return complex_from_json(j_.at(key), path(key));
  }

  std::optional<Complex> maybe_complex(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return complex_from_json(j_.at(key), path(key));
  }

  std::vector<Complex> complex_list(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) fail(path(key), "expected an array of [re, im] pairs");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(complex_from_json(v[i], path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json complex_list_json(const std::vector<Complex>& zs) {
  Json out = Json::array();
  for (Complex z : zs) out.push_back(complex_to_json(z));
  return out;
}

Json polynomial_json(const Polynomial& p) {
  return std::visit([](const auto& v) { return to_json(FunctionSpec(v)); }, p);
}

Polynomial polynomial_from_json(const Json& j, const std::string& path) {
  FunctionSpec spec = function_from_json(j, path);
  if (!is_polynomial(spec)) fail(path, "expected kind roots_product or coeffs");
  return as_polynomial(spec);
}

const char* flow_mode_name(FlowMode m) { return m == FlowMode::Raw ? "raw" : "desingularized"; }

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected a [re, im] pair");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(path, "must be finite");
  return z;
}

Json to_json(const FunctionSpec& spec) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json out;
        if constexpr (std::is_same_v<T, RootsProduct>) {
          out["kind"] = "roots_product";
          out["roots"] = complex_list_json(v.roots);
          out["leading"] = complex_to_json(v.leading);
        } else if constexpr (std::is_same_v<T, Coeffs>) {
          out["kind"] = "coeffs";
          out["coeffs"] = complex_list_json(v.coeffs);
        } else if constexpr (std::is_same_v<T, Rational>) {
          out["kind"] = "rational";
          out["num"] = polynomial_json(v.num);
          out["den"] = polynomial_json(v.den);
        } else if constexpr (std::is_same_v<T, NewtonQuotient>) {
          out["kind"] = "newton_quotient";
          out["p"] = polynomial_json(v.p);
        } else {
          out["kind"] = "exp_affine";
          out["a"] = complex_to_json(v.a);
          out["b"] = complex_to_json(v.b);
        }
        return out;
      },
      spec);
}

FunctionSpec function_from_json(const Json& j, const std::string& path) {
  Fields f(j, path);
  const std::string kind = f.text("kind", "");
  FunctionSpec out;
  if (kind == "roots_product") {
    out = RootsProduct{f.complex_list("roots"), f.complex("leading", 1.0)};
  } else if (kind == "coeffs") {
    out = Coeffs{f.complex_list("coeffs")};
  } else if (kind == "rational") {
    out = Rational{polynomial_from_json(f.at("num"), f.path("num")), polynomial_from_json(f.at("den"), f.path("den"))};
  } else if (kind == "newton_quotient") {
    out = NewtonQuotient{polynomial_from_json(f.at("p"), f.path("p"))};
  } else if (kind == "exp_affine") {
    out = ExpAffine{f.complex("a", Complex(0.0, 2.0)), f.complex("b", -1.0)};
  } else {
    fail(f.path("kind"), "unknown function kind '" + kind + "'");
  }
  f.finish();
  try {
    validate(out);
  } catch (const Error& e) {
    fail(path, message_of(e));
  }
  return out;
}

Json to_json(const BnqnParams& p) {
  Json out;
  out["deltas"] = Json::array({p.deltas[0], p.deltas[1], p.deltas[2]});
  out["tau"] = p.tau;
  out["theta"] = p.theta;
  out["gamma0"] = p.gamma0;
  out["backoff"] = p.backoff;
  out["armijo_c"] = p.armijo_c;
  out["grad_tol"] = p.stop.grad_tol;
  out["root_tol"] = p.stop.root_tol;
  out["crit_tol"] = p.stop.crit_tol;
  out["escape_radius"] = p.stop.escape_radius;
  out["max_iter"] = p.stop.max_iter;
  out["max_armijo"] = p.max_armijo;
  out["pole_eps"] = p.jet.pole_eps;
  out["overflow_cap"] = p.jet.overflow_cap;
  return out;
}

BnqnParams bnqn_params_from_json(const Json& j, const std::string& path) {
  Fields f(j, path);
  BnqnParams p;
  if (f.has("deltas")) {
    const Json& d = f.at("deltas");
    if (!d.is_array() || d.size() != 3) fail(f.path("deltas"), "expected exactly 3 numbers");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!d[i].is_number()) fail(f.path("deltas"), "expected exactly 3 numbers");
      p.deltas[i] = d[i].get<double>();
    }
  }
  p.tau = static_cast<int>(f.integer("tau", p.tau));
  p.theta = f.number("theta", p.theta);
  p.gamma0 = f.number("gamma0", p.gamma0);
  p.backoff = f.number("backoff", p.backoff);
  p.armijo_c = f.number("armijo_c", p.armijo_c);
  p.stop.grad_tol = f.number("grad_tol", p.stop.grad_tol);
  p.stop.root_tol = f.number("root_tol", p.stop.root_tol);
  p.stop.crit_tol = f.number("crit_tol", p.stop.crit_tol);
  p.stop.escape_radius = f.number("escape_radius", p.stop.escape_radius);
  p.stop.max_iter = static_cast<int>(f.integer("max_iter", p.stop.max_iter));
  p.max_armijo = static_cast<int>(f.integer("max_armijo", p.max_armijo));
  p.jet.pole_eps = f.number("pole_eps", p.jet.pole_eps);
  p.jet.overflow_cap = f.number("overflow_cap", p.jet.overflow_cap);
  f.finish();
  try {
    validate(p);
  } catch (const Error& e) {
    fail(path, message_of(e));
  }
  return p;
}

Json to_json(const GridSpec& g) {
  Json out;
  out["center"] = complex_to_json(g.center);
  out["half_width"] = g.half_width;
  out["half_height"] = g.half_height;
  out["nx"] = g.nx;
  out["ny"] = g.ny;
  return out;
}

GridSpec grid_from_json(const Json& j, const std::string& path) {
  Fields f(j, path);
  GridSpec g;
  g.center = f.complex("center", g.center);
  g.half_width = f.number("half_width", g.half_width);
  g.half_height = f.number("half_height", g.half_height);
  g.nx = static_cast<int>(f.integer("nx", g.nx));
  g.ny = static_cast<int>(f.integer("ny", g.ny));
  f.finish();
  try {
    validate(g);
  } catch (const Error& e) {
    fail(path, message_of(e));
  }
  return g;
}

Json to_json(const FlowParams& p) {
  Json out;
  out["dt"] = p.dt;
  out["t_max"] = p.t_max;
  out["mode"] = flow_mode_name(p.mode);
  out["singular_tol"] = p.singular_tol;
  out["record_every"] = p.record_every;
  return out;
}

FlowParams flow_from_json(const Json& j, const std::string& path) {
  Fields f(j, path);
  FlowParams p;
  p.dt = f.number("dt", p.dt);
  p.t_max = f.number("t_max", p.t_max);
  const std::string mode = f.text("mode", flow_mode_name(p.mode));
  if (mode == "raw")
    p.mode = FlowMode::Raw;
  else if (mode == "desingularized")
    p.mode = FlowMode::Desingularized;
  else
    fail(f.path("mode"), "expected raw or desingularized");
  p.singular_tol = f.number("singular_tol", p.singular_tol);
  p.record_every = static_cast<int>(f.integer("record_every", p.record_every));
  f.finish();
  if (!(p.dt > 0.0 && p.dt <= p.t_max)) fail(f.path("dt"), "must satisfy 0 < dt <= t_max");
  if (p.record_every < 1) fail(f.path("record_every"), "must be >= 1");
  return p;
}

Json to_json(const RunOutcome& o) {
  Json out;
  out["kind"] = to_string(o.kind);
  out["point"] = complex_to_json(o.point);
  out["iters"] = o.iters;
  return out;
}

Json to_json(const BasinStats& s) {
  Json out;
  out["coverage"] = s.coverage;
  out["per_root_fraction"] = s.per_root_fraction;
  out["boundary_adjacency_count"] = s.boundary_adjacency_count;
  out["unresolved_fraction"] = s.unresolved_fraction;
  out["critical_fraction"] = s.critical_fraction;
  out["diverged_fraction"] = s.diverged_fraction;
  return out;
}

Json to_json(const LocalProbeReport& r) {
  Json out;
  out["critical_point"] = complex_to_json(r.critical_point);
  out["d"] = r.model.d;
  out["a0"] = complex_to_json(r.model.a0);
  out["ad"] = complex_to_json(r.model.ad);
  out["phase"] = r.model.phase;
  out["r0"] = r.r0;
  out["expected_eigenvalue"] = r.expected_eigenvalue;
  out["max_eig_rel_err"] = r.max_eig_rel_err;
  out["d_estimate"] = r.d_estimate;
  out["repulsion_half_width"] = r.repulsion_half_width;
  out["repulsion_bound"] = r.repulsion_bound;
  out["min_repulsion_ratio"] = r.repulsion_samples > 0 ? Json(r.min_repulsion_ratio) : Json(nullptr);
  out["repulsion_samples"] = r.repulsion_samples;
  out["pass"] = r.pass();
  out["failures"] = r.failures;
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    Json js;
    js["z"] = complex_to_json(s.z);
    js["angle"] = s.angle;
    js["delta_index"] = s.delta_index;
    js["gamma"] = s.gamma;
    js["capped"] = s.capped;
    js["modulus_ratio"] = s.modulus_ratio;
    js["unstable_offset"] = s.unstable_offset;
    js["eig_rel_err"] = std::isfinite(s.eig_rel_err) ? Json(s.eig_rel_err) : Json(nullptr);
    samples.push_back(std::move(js));
  }
  out["samples"] = std::move(samples);
  return out;
}

Json to_json(const ConjugacyReport& r) {
  Json out;
  out["c"] = r.c;
  out["angle"] = r.angle;
  out["steps"] = r.steps;
  out["starts"] = r.starts;
  out["max_rel_err"] = r.max_rel_err;
  out["tol"] = r.tol;
  out["pass"] = r.pass();
  return out;
}

void validate(const RunConfig& cfg) {
  auto wrap = [](const std::string& path, auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      fail(path, message_of(e));
    }
  };
  wrap("function", [&] { validate(cfg.function); });
  wrap("bnqn", [&] { validate(cfg.bnqn); });
  wrap("grid", [&] { validate(cfg.grid); });
  parse_method(cfg.method);
  if (cfg.relaxed_gamma == Complex(0)) fail("relaxed.gamma", "must be nonzero");
  if (!(cfg.random_radius > 0.0 && cfg.random_radius < 1.0)) fail("random_relaxed.radius", "must lie in (0, 1)");
  if (!(cfg.flow.dt > 0.0 && cfg.flow.dt <= cfg.flow.t_max)) fail("flow.dt", "must satisfy 0 < dt <= t_max");
  if (cfg.threads < 1) fail("threads", "must be >= 1");
  if (cfg.local_samples < 1) fail("local.samples", "must be >= 1");
  if (cfg.local_r0 && !(*cfg.local_r0 > 0.0)) fail("local.r0", "must be positive");
  if (cfg.rate_steps < 1) fail("rate.steps", "must be >= 1");
  if (!(cfg.conj_c > 0.0)) fail("conjugacy.c", "must be positive");
  if (cfg.conj_steps < 0) fail("conjugacy.steps", "must be >= 0");
  if (cfg.voronoi_sites && cfg.voronoi_sites->empty()) fail("voronoi.sites", "must be nonempty");
}

MethodConfig method_config(const RunConfig& cfg) {
  MethodConfig m;
  m.method = parse_method(cfg.method);
  m.bnqn = cfg.bnqn;
  m.relaxed_gamma = cfg.relaxed_gamma;
  m.random_radius = cfg.random_radius;
  m.seed = cfg.seed;
  m.flow = cfg.flow;
  return m;
}

Json to_json(const RunConfig& c) {
  Json out;
  out["function"] = to_json(c.function);
  out["method"] = c.method;
  out["bnqn"] = to_json(c.bnqn);
  out["relaxed"] = {{"gamma", complex_to_json(c.relaxed_gamma)}};
  out["random_relaxed"] = {{"radius", c.random_radius}};
  out["flow"] = to_json(c.flow);
  out["grid"] = to_json(c.grid);
  out["outputs"] = {{"image_path", c.outputs.image_path},
                    {"stats_path", c.outputs.stats_path},
                    {"trace_path", c.outputs.trace_path}};
  out["seed"] = c.seed;
  out["trace"] = {{"z0", complex_to_json(c.z0)}};
  Json local;
  local["critical_point"] = c.critical_point ? complex_to_json(*c.critical_point) : Json(nullptr);
  local["samples"] = c.local_samples;
  local["r0"] = c.local_r0 ? Json(*c.local_r0) : Json(nullptr);
  out["local"] = std::move(local);
  out["rate"] = {{"steps", c.rate_steps}, {"limit", c.rate_limit ? complex_to_json(*c.rate_limit) : Json(nullptr)}};
  out["conjugacy"] = {{"c", c.conj_c},
                      {"angle", c.conj_angle},
                      {"steps", c.conj_steps},
                      {"starts", complex_list_json(c.conj_starts)}};
  out["voronoi"] = {{"sites", c.voronoi_sites ? complex_list_json(*c.voronoi_sites) : Json(nullptr)}};
  return out;
}

RunConfig config_from_json(const Json& root) {
  const Json& j = root.is_object() && root.contains("config") ? root.at("config") : root;
  Fields f(j, "");
  RunConfig c;
  if (f.has("function")) c.function = function_from_json(f.at("function"), "function");
  c.method = f.text("method", c.method);
  if (f.has("bnqn")) c.bnqn = bnqn_params_from_json(f.at("bnqn"), "bnqn");
  if (f.has("relaxed")) {
    Fields s(f.at("relaxed"), "relaxed");
    c.relaxed_gamma = s.complex("gamma", c.relaxed_gamma);
    s.finish();
  }
  if (f.has("random_relaxed")) {
    Fields s(f.at("random_relaxed"), "random_relaxed");
    c.random_radius = s.number("radius", c.random_radius);
    s.finish();
  }
  if (f.has("flow")) c.flow = flow_from_json(f.at("flow"), "flow");
  if (f.has("grid")) c.grid = grid_from_json(f.at("grid"), "grid");
  if (f.has("outputs")) {
    Fields s(f.at("outputs"), "outputs");
    c.outputs.image_path = s.text("image_path", c.outputs.image_path);
    c.outputs.stats_path = s.text("stats_path", c.outputs.stats_path);
    c.outputs.trace_path = s.text("trace_path", c.outputs.trace_path);
    s.finish();
  }
  {
    const long long seed = f.integer("seed", 0);
    if (seed < 0) fail("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  c.threads = static_cast<int>(f.integer("threads", c.threads));
  if (f.has("trace")) {
    Fields s(f.at("trace"), "trace");
    c.z0 = s.complex("z0", c.z0);
    s.finish();
  }
  if (f.has("local")) {
    Fields s(f.at("local"), "local");
    c.critical_point = s.maybe_complex("critical_point");
    c.local_samples = static_cast<int>(s.integer("samples", c.local_samples));
    s.ignore("r0");
    if (s.has("r0") && !f.at("local").at("r0").is_null()) c.local_r0 = s.number("r0", 0.0);
    s.finish();
  }
  if (f.has("rate")) {
    Fields s(f.at("rate"), "rate");
    c.rate_steps = static_cast<int>(s.integer("steps", c.rate_steps));
    c.rate_limit = s.maybe_complex("limit");
    s.finish();
  }
  if (f.has("conjugacy")) {
    Fields s(f.at("conjugacy"), "conjugacy");
    c.conj_c = s.number("c", c.conj_c);
    c.conj_angle = s.number("angle", c.conj_angle);
    c.conj_steps = static_cast<int>(s.integer("steps", c.conj_steps));
    if (s.has("starts")) c.conj_starts = s.complex_list("starts");
    s.finish();
  }
  if (f.has("voronoi")) {
    Fields s(f.at("voronoi"), "voronoi");
    s.ignore("sites");
    if (s.has("sites") && !f.at("voronoi").at("sites").is_null()) c.voronoi_sites = s.complex_list("sites");
    s.finish();
  }
  f.finish();
  validate(c);
  return c;
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(what, std::string("invalid JSON (") + e.what() + ")");
  }
}

}  // namespace bnqn
