// hopfms: command-line front end.
// Exit codes: 0 success, 64 configuration error, 65 construction failure,
// 66 verification failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopfms/analysis.hpp"
#include "hopfms/io.hpp"
#include "hopfms/realization.hpp"

#ifndef HOPFMS_DEFAULT_DATA_DIR
#define HOPFMS_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace hopfms;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 64;
constexpr int kConstruction = 65;
constexpr int kVerification = 66;

struct Flags {
  std::string config;
  std::string knot;
  std::string out;
  std::uint64_t seed = 0;
  bool raw_field = false;
  std::size_t resolution = 0;
  std::string profile;
  int branch = 1;
  bool chart = false;
  std::vector<std::string> inputs;
};

fs::path data_dir() {
  if (const char* d = std::getenv("HOPFMS_DATA_DIR"); d && *d) return d;
  return HOPFMS_DEFAULT_DATA_DIR;
}

RunConfig load_config(const Flags& f, CLI::App& app) {
  RunConfig c;
  if (!f.config.empty()) c = parse_config(read_file(f.config));
  if (app.count("--knot")) c.knot = f.knot;
  if (app.count("--out")) c.out = f.out;
  if (app.count("--seed")) c.seed = f.seed;
  if (app.count("--raw-field")) c.raw_field = true;
  if (app.count("--resolution")) c.resolution = f.resolution;
  if (app.count("--tolerance-profile")) c.tolerance_profile = f.profile;
  c.validate();
  return c;
}

fs::path out_file(const RunConfig& c, const std::string& name) { return fs::path(c.out) / name; }

void note(const std::string& s) { std::cerr << s << "\n"; }

int cmd_catalog(const RunConfig& c) {
  for (const auto& e : catalog_entries()) {
    const auto k = catalog_knot(e.name, c.resolution);
    std::cout << e.name << "\t" << e.description << "\tdegree " << s1_degree(*k) << "\n";
  }
  const fs::path dir = data_dir() / "knots";
  if (fs::is_directory(dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) std::cout << p.stem().string() << "\tdata file " << p.string() << "\n";
  }
  return kOk;
}

int cmd_validate(const RunConfig& c) {
  const auto k = resolve_knot(c.knot, c.resolution, data_dir());
  Json rep;
  rep["knot"] = k.name;
  rep["resolution"] = k.resolution();
  bool ok = true;
  try {
    const int deg = s1_degree(k);
    rep["s1_degree"] = deg;
    if (deg != 1 && deg != -1) {
      ok = false;
      note("validate: " + k.name + " has S1-degree " + std::to_string(deg) + ", a Hopf knot needs +-1");
    }
  } catch (const KnotError& e) {
    rep["s1_degree"] = nullptr;
    ok = false;
    note(std::string("validate: ") + e.what());
  }
  const auto emb = validate_embedding(k);
  rep["embedded"] = emb.ok;
  rep["min_clearance"] = emb.min_clearance;
  rep["clearance_tolerance"] = emb.clearance_tol;
  if (!emb.ok) {
    ok = false;
    note("validate: " + k.name + " is not embedded near segments " + std::to_string(emb.segment_a) + " and " +
         std::to_string(emb.segment_b));
  }
  rep["pass"] = ok;
  write_atomic(out_file(c, "validate_" + k.name + ".json"), dump(rep));
  note(std::string("validate: ") + k.name + (ok ? " is a Hopf knot" : " FAILED"));
  return ok ? kOk : kVerification;
}

RealizedMap build(const RunConfig& c, HopfKnotCurve& knot) {
  knot = resolve_knot(c.knot, c.resolution, data_dir());
  return realize(knot, c.field(), c.realize_options());
}

int cmd_realize(const RunConfig& c) {
  HopfKnotCurve k;
  const RealizedMap m = build(c, k);
  write_atomic(out_file(c, "realization_" + k.name + ".json"), dump(report_to_json(m.report())));
  write_atomic(out_file(c, "chart_" + k.name + ".json"), dump(chart_to_json(m.chart(), k.name)));
  note("realize: " + k.name + " r0 = " + std::to_string(m.chart().r0()));
  return kOk;
}

int cmd_census(const RunConfig& c) {
  HopfKnotCurve k;
  const SphereMap sm(build(c, k));
  VerificationSummary s = census(sm, &k, c.census_options());
  const auto g = glued_continuity(sm.realized(), 1000, c.seed);
  const double tol = 1e-7;
  s.criteria.push_back({"tube boundary gluing", g.max_discrepancy < tol, g.max_discrepancy, tol,
                        c.raw_field ? "raw field, cutoff disabled" : "smoothed field"});
  write_atomic(out_file(c, "census_" + k.name + ".json"), dump(summary_to_json(s)));
  std::cerr << summary_text(s);
  return s.ok() ? kOk : kVerification;
}

int cmd_separatrix(const RunConfig& c, int branch) {
  HopfKnotCurve k;
  const RealizedMap m = build(c, k);
  SeparatrixOptions so;
  so.epsilon = c.epsilon;
  so.samples_per_segment = c.samples_per_segment;
  const auto tr = trace_separatrix(m, branch, so);
  const std::string name = k.name + (branch > 0 ? "_separatrix+" : "_separatrix-");
  const Json meta = {{"source", k.name}, {"branch", branch}, {"converged", tr.converged},
                     {"iterations", tr.iterates.size()}, {"epsilon", c.epsilon}};
  write_atomic(out_file(c, name + ".json"), dump(polyline_to_json(name, tr.polyline, meta)));
  write_atomic(out_file(c, name + "_s3.json"), dump(sphere_polyline_to_json(name, tr.polyline, meta)));
  write_atomic(out_file(c, name + ".obj"), polylines_obj({{name, tr.polyline}}));
  if (!tr.converged) {
    note("separatrix: " + tr.reason);
    return kVerification;
  }
  return kOk;
}

int cmd_invariant(const RunConfig& c) {
  HopfKnotCurve k;
  const RealizedMap m = build(c, k);
  ExtractOptions eo;
  eo.separatrix.epsilon = c.epsilon;
  eo.separatrix.samples_per_segment = c.samples_per_segment;
  eo.weld_tolerance = c.tolerances().closure;
  bool ok = true;
  Json results = Json::array();
  for (int b : {1, -1}) {
    const auto r = extract_invariant_knot(m, b, &k, eo);
    results.push_back(invariant_to_json(r));
    if (r.closed) save_knot(out_file(c, r.knot.name + ".json"), r.knot, {{"source", k.name}, {"branch", b}});
    const bool pass = r.closed && r.degree == 1 && r.hausdorff_to_reference < m.chart().r0() + c.tolerances().sampling_slack;
    if (!pass) note("invariant: branch " + std::to_string(b) + " failed" + (r.reason.empty() ? "" : ": " + r.reason));
    ok = ok && pass;
  }
  write_atomic(out_file(c, "invariant_" + k.name + ".json"), dump(Json{{"knot", k.name}, {"results", results}}));
  return ok ? kOk : kVerification;
}

int cmd_plot(const RunConfig& c, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ConfigError("plot: no input files");
  std::vector<HopfKnotCurve> knots;
  std::vector<std::pair<std::string, std::vector<Point3>>> lines;
  for (const auto& in : inputs) {
    const Json j = parse_json(read_file(in), in);
    const std::string space = j.value("space", "");
    if (space == "S2xS1")
      knots.push_back(knot_from_json(j));
    else if (space == "R3")
      lines.emplace_back(j.value("name", fs::path(in).stem().string()), polyline_from_json(j));
    else
      note("plot: skipping " + in + " (space '" + space + "')");
  }
  if (knots.empty() && lines.empty()) throw ConfigError("plot: nothing to plot");
  if (!knots.empty()) {
    std::string title = "S2 x S1:";
    for (const auto& k : knots) title += " " + k.name;
    write_atomic(out_file(c, "plot_" + knots.front().name + ".svg"), plot_knots_svg(knots, title));
  }
  if (!lines.empty())
    write_atomic(out_file(c, "plot_" + lines.front().first + ".svg"),
                 plot_polylines_svg(lines, "R3, orthographic (x1, x2)"));
  return kOk;
}

int cmd_export(const RunConfig& c, const std::vector<std::string>& inputs, bool chart) {
  if (inputs.empty()) {
    const auto k = resolve_knot(c.knot, c.resolution, data_dir());
    save_knot(out_file(c, k.name + ".json"), k);
    // three periods of the lift for external viewers
    const auto lift = lift_to_r3(k);
    std::vector<Point3> pts;
    const std::size_t n = lift.period_samples();
    for (std::size_t i = 0; i <= 3 * n; ++i) pts.push_back(lift(lift.phase() - 1.0 + static_cast<double>(i) / n));
    write_atomic(out_file(c, k.name + "_lift.obj"), polylines_obj({{k.name, pts}}));
    if (chart) {
      const RealizedMap m = realize(k, c.field(), c.realize_options());
      write_atomic(out_file(c, "chart_" + k.name + ".json"), dump(chart_to_json(m.chart(), k.name)));
      write_atomic(out_file(c, k.name + "_tube.obj"), tube_obj(m.chart(), -1.0, 2.0, 3 * 64));
    }
    return kOk;
  }
  for (const auto& in : inputs) {
    const Json j = parse_json(read_file(in), in);
    const std::string stem = fs::path(in).stem().string();
    if (j.value("space", "") == "R3") {
      write_atomic(out_file(c, stem + ".obj"), polylines_obj({{stem, polyline_from_json(j)}}));
    } else if (j.value("space", "") == "S2xS1") {
      const auto k = knot_from_json(j);
      save_knot(out_file(c, stem + ".json"), k, j.value("metadata", Json::object()));
    } else {
      throw ConfigError("export: " + in + " is neither a knot nor a polyline");
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse-Smale diffeomorphisms of S3 realizing Hopf knots"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "configuration file");
  app.add_option("--knot", f.knot, "catalog name or knot file");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "random seed");
  app.add_flag("--raw-field", f.raw_field, "use the field without the boundary cutoff (negative control)");
  app.add_option("--resolution", f.resolution, "knot samples per loop");
  app.add_option("--tolerance-profile", f.profile, "strict or default")->check(CLI::IsMember({"strict", "default"}));

  auto* catalog = app.add_subcommand("catalog", "list the knot catalog");
  auto* validate = app.add_subcommand("validate", "check degree and embedding of a knot");
  auto* realize_cmd = app.add_subcommand("realize", "build the realized map and export its chart");
  auto* census_cmd = app.add_subcommand("census", "run every verification on the realized map");
  auto* separatrix = app.add_subcommand("separatrix", "trace a separatrix of the index-1 saddle");
  separatrix->add_option("--branch", f.branch, "+1 or -1")->check(CLI::IsMember({1, -1}));
  auto* invariant = app.add_subcommand("invariant", "extract both separatrix knots");
  auto* plot = app.add_subcommand("plot", "SVG figures from exported data files");
  plot->add_option("inputs", f.inputs, "knot or polyline JSON files");
  auto* exp = app.add_subcommand("export", "write knot JSON and OBJ files");
  exp->add_option("inputs", f.inputs, "knot or polyline JSON files");
  exp->add_flag("--chart", f.chart, "also export the tube chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig c = load_config(f, app);
    if (*catalog) return cmd_catalog(c);
    if (*validate) return cmd_validate(c);
    if (*realize_cmd) return cmd_realize(c);
    if (*census_cmd) return cmd_census(c);
    if (*separatrix) return cmd_separatrix(c, f.branch);
    if (*invariant) return cmd_invariant(c);
    if (*plot) return cmd_plot(c, f.inputs);
    if (*exp) return cmd_export(c, f.inputs, f.chart);
  } catch (const ConfigError& e) {
    note(std::string("config error: ") + e.what());
    return kConfig;
  } catch (const FormatError& e) {
    note(std::string("input error: ") + e.what());
    return kConfig;
  } catch (const RealizationError& e) {
    note(std::string("construction failed at ") + e.what());
    return kConstruction;
  } catch (const KnotError& e) {
    note(std::string("construction failed: ") + e.what());
    return kConstruction;
  } catch (const TubeError& e) {
    note(std::string("construction failed: ") + e.what());
    return kConstruction;
  } catch (const EvaluationError& e) {
    note(std::string("verification failed: ") + e.what());
    return kVerification;
  } catch (const std::exception& e) {
    note(std::string("error: ") + e.what());
    return kConstruction;
  }
  return kConfig;
}
