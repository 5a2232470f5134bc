#pragma once

// File formats: knot and polyline JSON, chart export, reports, SVG plots,
// OBJ meshes and the key/value run configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hopfms/analysis.hpp"
#include "hopfms/geometry.hpp"
#include "hopfms/knots.hpp"
#include "hopfms/realization.hpp"
#include "hopfms/tube.hpp"

namespace hopfms {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Files

/// Writes through a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw FormatError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Knots and polylines

namespace detail {

inline Json vec_json(const Vec3& v) { return Json::array({v.x1, v.x2, v.x3}); }

inline Vec3 json_vec(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// {name, space: "S2xS1", samples: [[u1, u2, u3, c], ...], orientation, metadata}
inline Json knot_to_json(const HopfKnotCurve& k, const Json& metadata = Json::object()) {
  Json samples = Json::array();
  for (const auto& p : k.samples) samples.push_back(Json::array({p.u.x1, p.u.x2, p.u.x3, p.c}));
  Json j;
  j["name"] = k.name;
  j["space"] = "S2xS1";
  j["version"] = kFormatVersion;
  j["orientation"] = k.orientation;
  j["samples"] = std::move(samples);
  j["metadata"] = metadata;
  return j;
}

inline HopfKnotCurve knot_from_json(const Json& j) {
  if (detail::field<std::string>(j, "space") != "S2xS1") throw FormatError("knot file: space must be S2xS1");
  HopfKnotCurve k;
  k.name = detail::field<std::string>(j, "name");
  k.orientation = j.value("orientation", 1);
  const auto& s = j.at("samples");
  if (!s.is_array() || s.size() < 4) throw FormatError("knot file: need at least 4 samples");
  for (const auto& e : s) {
    if (!e.is_array() || e.size() != 4) throw FormatError("knot file: samples are [u1, u2, u3, c]");
    const Vec3 u{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
    if (std::fabs(norm(u) - 1.0) > 1e-9) throw FormatError("knot file: sample off the unit sphere");
    k.samples.push_back({u, e[3].get<double>()});
  }
  if (k.closure_residual() > 1e-9) throw FormatError("knot file: last sample must repeat the first");
  return k;
}

inline std::string dump(const Json& j) { return j.dump(1) + "\n"; }

inline void save_knot(const std::filesystem::path& path, const HopfKnotCurve& k, const Json& metadata = Json::object()) {
  write_atomic(path, dump(knot_to_json(k, metadata)));
}

inline HopfKnotCurve load_knot(const std::filesystem::path& path) {
  try {
    return knot_from_json(parse_json(read_file(path), path.string()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// Polyline in R^3 or S^3.
inline Json polyline_to_json(const std::string& name, const std::vector<Point3>& pts,
                             const Json& metadata = Json::object()) {
  Json samples = Json::array();
  for (const auto& p : pts) samples.push_back(detail::vec_json(p));
  Json j;
  j["name"] = name;
  j["space"] = "R3";
  j["version"] = kFormatVersion;
  j["orientation"] = 1;
  j["samples"] = std::move(samples);
  j["metadata"] = metadata;
  return j;
}

inline Json sphere_polyline_to_json(const std::string& name, const std::vector<Point3>& pts,
                                    const Json& metadata = Json::object()) {
  Json samples = Json::array();
  for (const auto& p : pts) {
    const auto y = stereographic(p).y;
    samples.push_back(Json::array({y[0], y[1], y[2], y[3]}));
  }
  Json j = polyline_to_json(name, {}, metadata);
  j["space"] = "S3";
  j["samples"] = std::move(samples);
  return j;
}

inline std::vector<Point3> polyline_from_json(const Json& j) {
  if (detail::field<std::string>(j, "space") != "R3") throw FormatError("polyline: space must be R3");
  std::vector<Point3> out;
  for (const auto& e : j.at("samples")) out.push_back(detail::json_vec(e));
  return out;
}

// ---------------------------------------------------------------------------
// Charts

/// Everything needed to rebuild the chart bit for bit: lift nodes, phase,
/// frame nodes, holonomy, rotation, r0 and clearance.
inline Json chart_to_json(const TubeChart& c, const std::string& name) {
  Json lam = Json::array();
  for (const auto& v : c.curve().samples()) lam.push_back(detail::vec_json(v));
  Json fr = Json::array();
  for (const auto& v : c.frame_nodes()) fr.push_back(detail::vec_json(v));
  Json j;
  j["name"] = name;
  j["kind"] = "tube-chart";
  j["version"] = kFormatVersion;
  j["phase"] = c.curve().phase();
  j["r0"] = c.r0();
  j["clearance"] = c.clearance();
  j["holonomy"] = c.holonomy();
  j["frame_rotation"] = c.frame_rotation();
  j["lambda"] = std::move(lam);
  j["frame_e1"] = std::move(fr);
  return j;
}

inline TubeChart chart_from_json(const Json& j) {
  if (detail::field<std::string>(j, "kind") != "tube-chart") throw FormatError("not a tube chart");
  std::vector<Vec3> lam;
  std::vector<Vec3> fr;
  for (const auto& e : j.at("lambda")) lam.push_back(detail::json_vec(e));
  for (const auto& e : j.at("frame_e1")) fr.push_back(detail::json_vec(e));
  if (lam.size() != fr.size() || lam.size() < 4) throw FormatError("tube chart: lambda and frame sizes differ");
  FramedCurve f{EquivariantCurve(std::move(lam), detail::field<double>(j, "phase")), std::move(fr),
                detail::field<double>(j, "holonomy"), detail::field<double>(j, "frame_rotation")};
  return TubeChart(std::move(f), detail::field<double>(j, "r0"), detail::field<double>(j, "clearance"));
}

// ---------------------------------------------------------------------------
// Reports

inline Json report_to_json(const RealizationReport& r) {
  Json j;
  j["knot"] = r.knot;
  j["resolution"] = r.resolution;
  j["source_degree"] = r.source_degree;
  j["r0"] = r.radius.r0;
  j["r_sup"] = r.radius.r_sup;
  j["clearance"] = r.radius.clearance;
  j["radius_limited_by"] = r.radius.limited_by;
  j["holonomy"] = r.holonomy;
  j["frame_rotation"] = r.frame_rotation;
  j["field"] = {{"cutoff_inner", r.cutoff_inner}, {"cutoff_outer", r.cutoff_outer}, {"raw", r.raw_field}};
  j["integrator_step"] = r.step;
  j["modification_region"] = {{"chart_x1", Json::array({r.axial_lo, r.axial_hi})},
                              {"chart_rho_max", r.cutoff_outer},
                              {"norm", Json::array({r.norm_lo, r.norm_hi})}};
  j["short_circuit_exponent"] = r.k0;
  j["safe_ball_radius"] = r.safe_ball_radius;
  return j;
}

namespace detail {

/// NaN and infinities become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json eigen_json(const std::array<std::complex<double>, 3>& ev) {
  Json a = Json::array();
  for (const auto& z : ev) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

}  // namespace detail

inline Json fixed_points_to_json(const FixedPointCensus& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"index", p.morse_index},
                   {"kind", to_string(p.kind)},
                   {"chart", to_string(p.chart)},
                   {"location", detail::vec_json(p.location)},
                   {"sphere", Json::array({p.sphere.y[0], p.sphere.y[1], p.sphere.y[2], p.sphere.y[3]})},
                   {"eigenvalues", detail::eigen_json(p.eigenvalues)},
                   {"spectral_gap", p.spectral_gap()},
                   {"residual", p.residual}});
  }
  return {{"count", c.points.size()}, {"seeds", c.seeds}, {"converged", c.converged}, {"points", pts}};
}

inline Json invariant_to_json(const KnotInvariantResult& r) {
  return {{"name", r.knot.name},
          {"closed", r.closed},
          {"degree", r.degree},
          {"closure_residual", detail::number(r.closure_residual)},
          {"hausdorff_to_source", detail::number(r.hausdorff_to_reference)},
          {"richardson", detail::number(r.richardson)},
          {"r0", r.r0},
          {"iterations", r.trace.iterates.size()},
          {"max_chart_radius", r.trace.max_chart_radius},
          {"reason", r.reason}};
}

inline Json summary_to_json(const VerificationSummary& s) {
  Json crit = Json::array();
  for (const auto& c : s.criteria)
    crit.push_back({{"name", c.name},
                    {"pass", c.pass},
                    {"value", detail::number(c.value)},
                    {"tolerance", detail::number(c.tolerance)},
                    {"detail", c.detail}});
  Json het = Json::array();
  for (const auto& x : s.heteroclinic.samples)
    het.push_back({{"x1", x.x1},
                   {"forward_iterations", x.forward_iterations},
                   {"backward_iterations", x.backward_iterations},
                   {"invariance", x.invariance}});
  return {{"knot", s.knot},
          {"r0", s.r0},
          {"pass", s.ok()},
          {"criteria", crit},
          {"fixed_points", fixed_points_to_json(s.fixed_points)},
          {"heteroclinic", {{"axis_velocity", s.heteroclinic.axis_velocity}, {"samples", het}}},
          {"invariant_plus", invariant_to_json(s.invariant_plus)},
          {"invariant_minus", invariant_to_json(s.invariant_minus)},
          {"mutual_hausdorff", detail::number(s.mutual_hausdorff)}};
}

/// One line per criterion, for people.
inline std::string summary_text(const VerificationSummary& s) {
  std::ostringstream o;
  o << "knot " << s.knot << "  r0 = " << s.r0 << "\n";
  for (const auto& c : s.criteria) {
    o << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tolerance " << c.tolerance << ")";
    if (!c.detail.empty()) o << "  [" << c.detail << "]";
    o << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// SVG

class Svg {
 public:
  Svg(double width, double height) : w_(width), h_(height) {}

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke = 1.0) {
    if (pts.size() < 2) return;
    o_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o_ << (i ? " " : "") << fmt(pts[i].first) << "," << fmt(pts[i].second);
    o_ << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& color) {
    o_ << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r) << "\" fill=\"" << color
       << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& stroke) {
    o_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
       << "\" fill=\"none\" stroke=\"" << stroke << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, double size = 12.0) {
    o_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
       << "\">" << escape(s) << "</text>\n";
  }
  std::string str() const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\" viewBox=\"0 0 "
      << w_ << " " << h_ << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << o_.str() << "</svg>\n";
    return o.str();
  }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '<')
        r += "&lt;";
      else if (c == '>')
        r += "&gt;";
      else if (c == '&')
        r += "&amp;";
      else
        r += c;
    }
    return r;
  }
  double w_, h_;
  std::ostringstream o_;
};

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> p{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  return p;
}

namespace detail {

/// Splits a curve on a torus development wherever a coordinate wraps.
inline std::vector<std::vector<std::pair<double, double>>> split_wraps(const std::vector<std::pair<double, double>>& p,
                                                                       double jump_x, double jump_y) {
  std::vector<std::vector<std::pair<double, double>>> parts(1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0 && (std::fabs(p[i].first - p[i - 1].first) > jump_x || std::fabs(p[i].second - p[i - 1].second) > jump_y))
      parts.emplace_back();
    parts.back().push_back(p[i]);
  }
  return parts;
}

}  // namespace detail

/// Developments of S^2 x S^1 curves: circle coordinate against sphere
/// longitude (left) and latitude (right).
inline std::string plot_knots_svg(const std::vector<HopfKnotCurve>& knots, const std::string& title) {
  const double pw = 320.0;
  const double ph = 320.0;
  const double m = 40.0;
  Svg svg(2 * pw + 3 * m, ph + 2 * m + 20);
  svg.text(m, 24, title, 14);
  for (int panel = 0; panel < 2; ++panel) {
    const double x0 = m + panel * (pw + m);
    const double y0 = m + 10;
    svg.rect(x0, y0, pw, ph, "#888");
    svg.text(x0, y0 + ph + 22, panel == 0 ? "longitude (x) vs circle coordinate (y)" : "latitude (x) vs circle coordinate (y)", 11);
    for (std::size_t k = 0; k < knots.size(); ++k) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& s : knots[k].samples) {
        const double lon = std::atan2(s.u.x2, s.u.x1);
        const double lat = std::asin(std::clamp(s.u.x3, -1.0, 1.0));
        const double xs = panel == 0 ? (lon + std::numbers::pi) / (2 * std::numbers::pi)
                                     : (lat + 0.5 * std::numbers::pi) / std::numbers::pi;
        pts.emplace_back(x0 + pw * xs, y0 + ph * (1.0 - wrap_unit(s.c)));
      }
      for (const auto& part : detail::split_wraps(pts, 0.5 * pw, 0.5 * ph))
        svg.polyline(part, palette()[k % palette().size()], 1.2);
      svg.text(x0 + 6, y0 + 16 + 14 * static_cast<double>(k), knots[k].name, 11);
    }
  }
  return svg.str();
}

/// Orthographic view of R^3 polylines onto the (x1, x2) or another plane.
inline std::string plot_polylines_svg(const std::vector<std::pair<std::string, std::vector<Point3>>>& lines,
                                      const std::string& title, int axis_a = 0, int axis_b = 1,
                                      const std::vector<Point3>& markers = {}) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [n, l] : lines)
    for (const auto& p : l) {
      lo = std::min({lo, p[axis_a], p[axis_b]});
      hi = std::max({hi, p[axis_a], p[axis_b]});
    }
  for (const auto& p : markers) {
    lo = std::min({lo, p[axis_a], p[axis_b]});
    hi = std::max({hi, p[axis_a], p[axis_b]});
  }
  if (!(hi > lo)) {
    lo = -1.0;
    hi = 1.0;
  }
  const double size = 480.0;
  const double m = 40.0;
  Svg svg(size + 2 * m, size + 2 * m);
  svg.text(m, 24, title, 14);
  svg.rect(m, m, size, size, "#888");
  auto px = [&](const Point3& p) {
    return std::pair{m + size * (p[axis_a] - lo) / (hi - lo), m + size * (1.0 - (p[axis_b] - lo) / (hi - lo))};
  };
  for (std::size_t k = 0; k < lines.size(); ++k) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : lines[k].second) pts.push_back(px(p));
    svg.polyline(pts, palette()[k % palette().size()], 1.0);
    svg.text(m + 6, m + 16 + 14 * static_cast<double>(k), lines[k].first, 11);
  }
  for (const auto& p : markers) {
    const auto [x, y] = px(p);
    svg.circle(x, y, 3.0, "black");
  }
  return svg.str();
}

// ---------------------------------------------------------------------------
// OBJ

inline std::string polylines_obj(const std::vector<std::pair<std::string, std::vector<Point3>>>& lines) {
  std::ostringstream o;
  o.precision(17);
  std::size_t base = 1;
  for (const auto& [name, pts] : lines) {
    o << "o " << name << "\n";
    for (const auto& p : pts) o << "v " << p.x1 << " " << p.x2 << " " << p.x3 << "\n";
    if (pts.size() >= 2) {
      o << "l";
      for (std::size_t i = 0; i < pts.size(); ++i) o << " " << base + i;
      o << "\n";
    }
    base += pts.size();
  }
  return o.str();
}

/// Tube surface rho = rho_max over chart x1 in [t0, t1].
inline std::string tube_obj(const TubeChart& c, double t0, double t1, int stations, int ring = 16,
                            double rho = kCylinderRadius) {
  std::ostringstream o;
  o.precision(17);
  o << "o tube\n";
  for (int i = 0; i <= stations; ++i) {
    const double t = t0 + (t1 - t0) * i / stations;
    for (int j = 0; j < ring; ++j) {
      const double a = 2.0 * std::numbers::pi * j / ring;
      const Point3 p = c.map_unchecked({t, rho * std::cos(a), rho * std::sin(a)});
      o << "v " << p.x1 << " " << p.x2 << " " << p.x3 << "\n";
    }
  }
  for (int i = 0; i < stations; ++i)
    for (int j = 0; j < ring; ++j) {
      const int a = i * ring + j + 1;
      const int b = i * ring + (j + 1) % ring + 1;
      o << "f " << a << " " << b << " " << b + ring << " " << a + ring << "\n";
    }
  return o.str();
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string knot = "L0";
  std::size_t resolution = 800;
  double cutoff_inner = 1.2;
  double cutoff_outer = 1.8;
  bool raw_field = false;
  double step = 1e-3;
  double epsilon = 1e-6;
  int samples_per_segment = 1000;
  int basin_budget = 400;
  int basin_samples = 1000;
  int fixed_point_grid = 5;
  double fd_step = 1e-6;
  std::string tolerance_profile = "default";
  std::string out = "out";
  std::uint64_t seed = 1;

  void validate() const {
    if (resolution < 64) throw ConfigError("knot.resolution must be at least 64");
    if (!(cutoff_inner > 0.0 && cutoff_inner < cutoff_outer && cutoff_outer < 2.0))
      throw ConfigError("field cutoffs need 0 < cutoff_inner < cutoff_outer < 2");
    if (!(step > 0.0 && step <= 0.1)) throw ConfigError("integrator.step must lie in (0, 0.1]");
    if (!(epsilon > 0.0 && epsilon < 1e-2)) throw ConfigError("analysis.epsilon must lie in (0, 1e-2)");
    if (samples_per_segment < 8) throw ConfigError("analysis.samples_per_segment must be at least 8");
    if (basin_budget < 1 || basin_samples < 0 || fixed_point_grid < 1)
      throw ConfigError("analysis budgets must be positive");
    if (!(fd_step > 0.0 && fd_step < 1e-2)) throw ConfigError("analysis.fd_step must lie in (0, 1e-2)");
    if (tolerance_profile != "default" && tolerance_profile != "strict")
      throw ConfigError("tolerance profile must be 'default' or 'strict'");
  }

  Tolerances tolerances() const { return tolerance_profile == "strict" ? Tolerances::strict() : Tolerances{}; }

  PhiField field() const { return PhiField(cutoff_inner, cutoff_outer); }

  RealizeOptions realize_options() const {
    RealizeOptions o;
    o.flow.step = step;
    o.flow.raw = raw_field;
    return o;
  }

  CensusOptions census_options() const {
    CensusOptions o;
    o.tol = tolerances();
    o.fixed_points.grid = fixed_point_grid;
    o.fixed_points.fd_step = fd_step;
    o.extract.separatrix.epsilon = epsilon;
    o.extract.separatrix.samples_per_segment = samples_per_segment;
    o.basin.budget = basin_budget;
    o.basin_samples = basin_samples;
    o.seed = seed;
    return o;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Sections of `key = value` lines; '#' starts a comment, strings are quoted.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  auto kv = parse_key_values(text);
  auto take = [&](const std::string& key, auto& dst) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    using T = std::decay_t<decltype(dst)>;
    const std::string& v = it->second;
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, std::string>) {
        dst = v;
        used = v.size();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (v != "true" && v != "false") throw ConfigError(key + ": expected true or false");
        dst = v == "true";
        used = v.size();
      } else if constexpr (std::is_floating_point_v<T>) {
        dst = std::stod(v, &used);
      } else {
        const long long n = std::stoll(v, &used);
        if (n < 0) throw ConfigError(key + ": must not be negative");
        dst = static_cast<T>(n);
      }
      if (used != v.size()) throw ConfigError(key + ": trailing characters in '" + v + "'");
    } catch (const std::logic_error&) {
      throw ConfigError(key + ": cannot parse '" + v + "'");
    }
    kv.erase(it);
  };
  take("knot.name", c.knot);
  take("knot.resolution", c.resolution);
  take("field.cutoff_inner", c.cutoff_inner);
  take("field.cutoff_outer", c.cutoff_outer);
  take("field.raw", c.raw_field);
  take("integrator.step", c.step);
  take("analysis.epsilon", c.epsilon);
  take("analysis.samples_per_segment", c.samples_per_segment);
  take("analysis.basin_budget", c.basin_budget);
  take("analysis.basin_samples", c.basin_samples);
  take("analysis.fixed_point_grid", c.fixed_point_grid);
  take("analysis.fd_step", c.fd_step);
  take("tolerances.profile", c.tolerance_profile);
  take("output.dir", c.out);
  take("output.seed", c.seed);
  if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");
  c.validate();
  return c;
}

inline std::string config_text(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "[knot]\nname = \"" << c.knot << "\"\nresolution = " << c.resolution << "\n\n"
    << "[field]\ncutoff_inner = " << c.cutoff_inner << "\ncutoff_outer = " << c.cutoff_outer
    << "\nraw = " << (c.raw_field ? "true" : "false") << "\n\n"
    << "[integrator]\nstep = " << c.step << "\n\n"
    << "[analysis]\nepsilon = " << c.epsilon << "\nsamples_per_segment = " << c.samples_per_segment
    << "\nbasin_budget = " << c.basin_budget << "\nbasin_samples = " << c.basin_samples
    << "\nfixed_point_grid = " << c.fixed_point_grid << "\nfd_step = " << c.fd_step << "\n\n"
    << "[tolerances]\nprofile = \"" << c.tolerance_profile << "\"\n\n"
    << "[output]\ndir = \"" << c.out << "\"\nseed = " << c.seed << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Catalog lookup

struct CatalogEntry {
  std::string name;
  std::string description;
};

inline std::vector<CatalogEntry> catalog_entries() {
  return {{"L0", "standard Hopf knot {u} x S1, u = (0, 0, 1)"},
          {"LM", "Mazur knot"},
          {"LM_n1", "generalized Mazur knot, one extra twist of the clasp"},
          {"LM_n2", "generalized Mazur knot, two extra twists of the clasp"},
          {"LM_k1", "generalized Mazur knot, one extra winding of the band"}};
}

/// Built-in catalog knot by name; std::nullopt for unknown names.
inline std::optional<HopfKnotCurve> catalog_knot(const std::string& name, std::size_t resolution) {
  if (name == "L0") return standard_hopf({0.0, 0.0, 1.0}, resolution);
  if (name == "LM") return mazur_knot(resolution);
  if (name.rfind("LM_n", 0) == 0 || name.rfind("LM_k", 0) == 0) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(name.substr(4), &used);
      if (used != name.size() - 4 || n < 1) return std::nullopt;
    } catch (const std::logic_error&) {
      return std::nullopt;
    }
    return name[3] == 'n' ? generalized_mazur(n, resolution) : generalized_mazur_k(n, resolution);
  }
  return std::nullopt;
}

/// Catalog name, path to a knot file, or a name under the data directory.
inline HopfKnotCurve resolve_knot(const std::string& selector, std::size_t resolution,
                                  const std::filesystem::path& data_dir = {}) {
  if (auto k = catalog_knot(selector, resolution)) return *k;
  if (std::filesystem::exists(selector)) return load_knot(selector);
  if (!data_dir.empty()) {
    const auto p = data_dir / "knots" / (selector + ".json");
    if (std::filesystem::exists(p)) return load_knot(p);
  }
  throw ConfigError("unknown knot '" + selector + "' (not a catalog name or file)");
}

}  // namespace hopfms
