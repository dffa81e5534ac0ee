#include "cli_app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bnqn/baselines.hpp"
#include "bnqn/basins.hpp"
#include "bnqn/error.hpp"
#include "bnqn/json_io.hpp"
#include "bnqn/localdyn.hpp"

namespace bnqn::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::vector<std::string> configs;
  std::string out_dir{"."};
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> z0;
  std::optional<double> c;
  std::optional<double> angle;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path resolve(const Flags& flags, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : fs::path(flags.out_dir) / p;
}

Complex parse_point(const std::string& text, const std::string& field) {
  std::string s = text;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream in(s);
  double re = 0, im = 0;
  const bool ok = (in >> re) && ((in >> std::ws).eof() || ((in >> im) && (in >> std::ws).eof()));
  if (!ok) throw Error(ErrorCode::InvalidArgument, field + ": expected 're,im'");
  return {re, im};
}

// Defaults, then the config file, then flags.
RunConfig load_config(const std::optional<std::string>& path, const Flags& flags) {
  Json j = Json::object();
  if (path) j = parse_json_text(read_file(*path), "config");
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.threads) j["threads"] = *flags.threads;
  if (flags.z0) j["trace"]["z0"] = complex_to_json(parse_point(*flags.z0, "z0"));
  if (flags.c) j["conjugacy"]["c"] = *flags.c;
  if (flags.angle) j["conjugacy"]["angle"] = *flags.angle;
  return config_from_json(j);
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string config_comment(const RunConfig& cfg) { return "# config: " + to_json(cfg).dump() + "\n"; }

Json roots_json(const std::vector<Complex>& roots) {
  Json out = Json::array();
  for (Complex r : roots) out.push_back(complex_to_json(r));
  return out;
}

Json basin_report(const RunConfig& cfg, const BasinImage& image) {
  Json out;
  out["config"] = to_json(cfg);
  out["roots"] = roots_json(image.roots);
  const Json stats = to_json(basin_stats(image));
  for (auto it = stats.begin(); it != stats.end(); ++it) out[it.key()] = it.value();
  return out;
}

int cmd_basins(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  const auto image = classify_grid(cfg.function, method_config(cfg), cfg.grid, std::nullopt, cfg.threads);
  const auto report = basin_report(cfg, image);
  write_file(resolve(flags, cfg.outputs.image_path), render_ppm(image));
  write_file(resolve(flags, cfg.outputs.stats_path), report.dump(2) + "\n");
  out << "basins: " << image.roots.size() << " roots, coverage " << report["coverage"].get<double>() << "\n";
  return kExitOk;
}

int cmd_voronoi(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  std::vector<Complex> sites;
  if (cfg.voronoi_sites) {
    sites = *cfg.voronoi_sites;
  } else {
    const double reach = std::hypot(cfg.grid.half_width, cfg.grid.half_height);
    for (Complex z : known_zeros(cfg.function, cfg.grid.center, reach)) {
      const Complex d = z - cfg.grid.center;
      if (std::abs(d.real()) <= cfg.grid.half_width && std::abs(d.imag()) <= cfg.grid.half_height) sites.push_back(z);
    }
    if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "voronoi.sites: f has no zeros inside the grid");
  }
  const auto image = voronoi_raster(sites, cfg.grid);
  write_file(resolve(flags, cfg.outputs.image_path), render_ppm(image));
  write_file(resolve(flags, cfg.outputs.stats_path), basin_report(cfg, image).dump(2) + "\n");
  out << "voronoi: " << sites.size() << " sites\n";
  return kExitOk;
}

int cmd_trace(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  if (cfg.method != "bnqn") throw Error(ErrorCode::InvalidArgument, "method: trace records bnqn steps only");
  const auto result = run<double>(cfg.z0, cfg.function, cfg.bnqn, true);
  std::ostringstream csv;
  csv << config_comment(cfg);
  csv << "step,re,im,F,grad_norm,delta_index,gamma,armijo_trials\n";
  int step = 0;
  for (const auto& r : result.trace) {
    csv << step++ << ',' << fmt(r.z.real()) << ',' << fmt(r.z.imag()) << ',' << fmt(r.fval) << ','
        << fmt(r.grad_norm) << ',' << r.delta_index << ',' << fmt(r.gamma) << ',' << r.armijo_trials << '\n';
  }
  const Complex z = result.outcome.point;
  std::string fval, gnorm;
  try {
    const auto gh = evaluate_objective<double>(cfg.function, z, cfg.bnqn.jet);
    fval = fmt(gh.fval);
    gnorm = fmt(gh.grad.norm());
  } catch (const Error&) {
  }
  csv << step << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fval << ',' << gnorm << ",,,\n";
  csv << "# outcome: " << to_string(result.outcome.kind) << " iters=" << result.outcome.iters << "\n";
  write_file(resolve(flags, cfg.outputs.trace_path), csv.str());
  out << "trace: " << to_string(result.outcome.kind) << " after " << result.outcome.iters << " steps\n";
  return kExitOk;
}

int cmd_local(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  std::vector<Complex> points;
  if (cfg.critical_point)
    points.push_back(*cfg.critical_point);
  else
    points = known_critical_points(cfg.function);
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "local.critical_point: f has no critical points");

  LocalProbeOptions opt;
  opt.samples = cfg.local_samples;
  opt.r0 = cfg.local_r0;
  Json reports = Json::array();
  bool pass = true;
  std::string first_failure;
  for (Complex p : points) {
    try {
      const auto rep = bnqn_local_probe(cfg.function, p, cfg.bnqn, opt);
      if (!rep.pass() && first_failure.empty()) first_failure = rep.failures.front();
      pass = pass && rep.pass();
      reports.push_back(to_json(rep));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProbeFailed) throw;
      pass = false;
      if (first_failure.empty()) first_failure = e.what();
      reports.push_back({{"critical_point", complex_to_json(p)}, {"pass", false}, {"failures", {e.what()}}});
    }
  }
  Json doc;
  doc["config"] = to_json(cfg);
  doc["pass"] = pass;
  doc["reports"] = std::move(reports);
  write_file(resolve(flags, "local.json"), doc.dump(2) + "\n");
  out << "local: " << points.size() << " critical points, " << (pass ? "pass" : "FAIL") << "\n";
  if (!pass) throw ProbeFailure(first_failure);
  return kExitOk;
}

int cmd_rate(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  std::vector<Complex> pts;
  if (cfg.method == "bnqn")
    pts = orbit<double>(cfg.z0, cfg.function, cfg.bnqn, cfg.rate_steps);
  else if (cfg.method == "newton")
    pts = newton_iterates(cfg.function, cfg.z0, cfg.rate_steps, 1.0, cfg.bnqn.jet);
  else
    throw Error(ErrorCode::InvalidArgument, "method: rate supports bnqn and newton");

  Complex limit = pts.back();
  if (cfg.rate_limit) {
    limit = *cfg.rate_limit;
  } else {
    auto candidates = known_zeros(cfg.function, pts.back(), 1.0);
    const auto crit = known_critical_points(cfg.function);
    candidates.insert(candidates.end(), crit.begin(), crit.end());
    double best = 1e-3;
    for (Complex c : candidates) {
      if (std::abs(c - pts.back()) < best) {
        best = std::abs(c - pts.back());
        limit = c;
      }
    }
  }
  const auto est = contraction_rate(pts, limit);
  Json doc;
  doc["config"] = to_json(cfg);
  doc["z0"] = complex_to_json(cfg.z0);
  doc["limit"] = complex_to_json(limit);
  doc["ratio"] = est.ratio;
  doc["superlinear"] = est.superlinear;
  doc["tail_points"] = est.tail_points;
  doc["expected"] = nullptr;
  try {
    const auto model = local_model(cfg.function, limit);
    if (model.a0 == Complex(0) || std::abs(eval_jet<double>(cfg.function, limit).f) <= cfg.bnqn.stop.root_tol) {
      const int d = model.d;
      doc["multiplicity"] = d;
      doc["expected"] = cfg.method == "bnqn" ? (2.0 * d - 2.0) / (2.0 * d - 1.0) : (d - 1.0) / d;
    }
  } catch (const Error&) {
  }
  write_file(resolve(flags, "rate.json"), doc.dump(2) + "\n");
  out << "rate: " << (est.superlinear ? "superlinear" : "ratio " + fmt(est.ratio)) << "\n";
  return kExitOk;
}

int cmd_conjugacy(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  const auto rep = conjugacy_check(cfg.function, cfg.bnqn, cfg.conj_c, cfg.conj_angle, cfg.conj_starts, cfg.conj_steps);
  Json doc;
  doc["config"] = to_json(cfg);
  const Json body = to_json(rep);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  write_file(resolve(flags, "conjugacy.json"), doc.dump(2) + "\n");
  out << "conjugacy: max relative deviation " << rep.max_rel_err << (rep.pass() ? " pass" : " FAIL") << "\n";
  if (!rep.pass()) throw ProbeFailure("conjugacy deviation " + fmt(rep.max_rel_err) + " exceeds " + fmt(rep.tol));
  return kExitOk;
}

int cmd_flow(const RunConfig& cfg, const Flags& flags, std::ostream& out) {
  const auto samples = newton_flow(cfg.function, cfg.z0, cfg.flow, cfg.bnqn.jet);
  std::ostringstream csv;
  csv << config_comment(cfg) << "t,re,im\n";
  for (const auto& s : samples) csv << fmt(s.t) << ',' << fmt(s.z.real()) << ',' << fmt(s.z.imag()) << '\n';
  write_file(resolve(flags, cfg.outputs.trace_path), csv.str());
  out << "flow: " << samples.size() << " samples\n";
  return kExitOk;
}

int cmd_compare(const std::vector<RunConfig>& cfgs, const Flags& flags, std::ostream& out) {
  Json doc;
  doc["config"] = to_json(cfgs.front());
  Json runs = Json::array();
  for (const auto& cfg : cfgs) {
    const auto image = classify_grid(cfg.function, method_config(cfg), cfg.grid, std::nullopt, cfg.threads);
    runs.push_back(basin_report(cfg, image));
  }
  doc["runs"] = std::move(runs);
  write_file(resolve(flags, "compare.json"), doc.dump(2) + "\n");
  out << "compare: " << cfgs.size() << " runs\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Backtracking New Q-Newton root finding, baselines and basin images"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&](CLI::App* sub, bool many_configs = false) {
    if (many_configs)
      sub->add_option("--config", flags.configs, "Config JSON files")->required();
    else
      sub->add_option("--config", flags.configs, "Config JSON file")->expected(0, 1);
    sub->add_option("--out", flags.out_dir, "Output directory");
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--threads", flags.threads, "Worker threads (output does not depend on it)");
    return sub;
  };
  auto* basins = common(app.add_subcommand("basins", "Classify a grid of starting points and render the basins"));
  auto* voronoi = common(app.add_subcommand("voronoi", "Rasterize the Voronoi diagram of the roots"));
  auto* trace = common(app.add_subcommand("trace", "Write the BNQN trace from one starting point as CSV"));
  auto* local = common(app.add_subcommand("local", "Probe the local dynamics at critical points"));
  auto* rate = common(app.add_subcommand("rate", "Estimate the local convergence rate"));
  auto* conj = common(app.add_subcommand("conjugacy", "Check invariance under z -> c e^{i angle} z"));
  auto* flow = common(app.add_subcommand("flow", "Integrate Newton's flow and write the trajectory"));
  auto* compare = common(app.add_subcommand("compare", "Basin statistics for several configs side by side"), true);
  for (auto* sub : {trace, rate, flow}) sub->add_option("--z0", flags.z0, "Starting point as re,im");
  conj->add_option("--c", flags.c, "Scale factor c > 0");
  conj->add_option("--angle", flags.angle, "Rotation angle in radians");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (sub == compare) {
      std::vector<RunConfig> cfgs;
      for (const auto& path : flags.configs) cfgs.push_back(load_config(path, flags));
      return cmd_compare(cfgs, flags, out);
    }
    std::optional<std::string> path;
    if (!flags.configs.empty()) path = flags.configs.front();
    const RunConfig cfg = load_config(path, flags);
    if (sub == basins) return cmd_basins(cfg, flags, out);
    if (sub == voronoi) return cmd_voronoi(cfg, flags, out);
    if (sub == trace) return cmd_trace(cfg, flags, out);
    if (sub == local) return cmd_local(cfg, flags, out);
    if (sub == rate) return cmd_rate(cfg, flags, out);
    if (sub == conj) return cmd_conjugacy(cfg, flags, out);
    if (sub == flow) return cmd_flow(cfg, flags, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ProbeFailure& e) {
    err << "probe failed: " << e.what() << "\n";
    return kExitProbe;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::DuplicateDeltas:
      case ErrorCode::EmptySites:
      case ErrorCode::PaletteTooSmall: return kExitConfig;
      case ErrorCode::ProbeFailed: return kExitProbe;
      default: return kExitFailure;
    }
  }
  return kExitFailure;
}

}  // namespace bnqn::cli
