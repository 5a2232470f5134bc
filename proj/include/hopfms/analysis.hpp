#pragma once

// Verification instruments for a realized map: fixed points and their
// classification, the orbit-space projection of the sink basin, separatrix
// tracing and invariant-knot extraction, the projected unstable surface of
// the index-2 saddle, and heteroclinic certification.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hopfms/geometry.hpp"
#include "hopfms/knots.hpp"
#include "hopfms/linalg.hpp"
#include "hopfms/model.hpp"
#include "hopfms/realization.hpp"
#include "hopfms/tube.hpp"

namespace hopfms {

// ---------------------------------------------------------------------------
// Fixed points

enum class ChartTag { Standard, Inverted };
enum class FixedPointKind { Sink, Saddle, Source };

inline const char* to_string(ChartTag c) { return c == ChartTag::Standard ? "standard" : "inverted"; }
inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Sink:
      return "sink";
    case FixedPointKind::Saddle:
      return "saddle";
    case FixedPointKind::Source:
      return "source";
  }
  return "?";
}

struct FixedPointRecord {
  Point3 location;
  ChartTag chart = ChartTag::Standard;
  SpherePoint4 sphere;
  Mat3 jacobian;
  std::array<std::complex<double>, 3> eigenvalues{};
  int morse_index = 0;
  FixedPointKind kind = FixedPointKind::Sink;
  double residual = 0.0;

  /// Smallest distance of an eigenvalue modulus from 1.
  double spectral_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) g = std::min(g, std::fabs(std::abs(z) - 1.0));
    return g;
  }
  bool hyperbolic(double tol = 1e-6) const { return spectral_gap() > tol; }
};

struct FixedPointOptions {
  int grid = 5;             // seeds per axis of the coarse grid
  double fd_step = 1e-6;    // relative central-difference step
  int max_iterations = 40;
  double dedup = 1e-6;      // distance on S^3
};

struct FixedPointCensus {
  std::vector<FixedPointRecord> points;
  int seeds = 0;
  int converged = 0;

  /// Morse indices in ascending order.
  std::vector<int> indices() const {
    std::vector<int> v;
    for (const auto& p : points) v.push_back(p.morse_index);
    std::sort(v.begin(), v.end());
    return v;
  }
  bool ok() const {
    if (points.size() != 4) return false;
    for (const auto& p : points)
      if (!p.hyperbolic()) return false;
    return indices() == std::vector<int>{0, 1, 2, 3};
  }
};

namespace detail {

template <class F>
Mat3 map_jacobian(F&& f, const Point3& x, double rel_step) {
  const double h = rel_step * std::max(norm(x), 1e-3);
  return finite_difference_jacobian(f, x, h);
}

template <class F>
std::optional<Point3> newton_fixed_point(F&& f, Point3 x, const FixedPointOptions& opt) {
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vec3 fx = f(x) - x;
    const double scale = norm(x);
    if (norm(fx) <= 1e-14 * scale || norm(fx) == 0.0) return x;
    const Mat3 j = map_jacobian(f, x, opt.fd_step) - Mat3::identity();
    Vec3 dx;
    try {
      dx = solve(j, -fx);
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
    // keep the iterate away from wild jumps on a bad seed
    const double cap = 0.5 * scale + 1e-3;
    if (norm(dx) > cap) dx = dx * (cap / norm(dx));
    x += dx;
    if (!std::isfinite(norm(x))) return std::nullopt;
    if (norm(dx) <= 1e-13 * std::max(norm(x), 1e-300)) return x;
  }
  return std::nullopt;
}

}  // namespace detail

/// Classification of a fixed point of `f` (a chart expression of the map).
template <class F>
FixedPointRecord classify_fixed_point(F&& f, const Point3& x, ChartTag chart, double rel_step = 1e-6) {
  FixedPointRecord r;
  r.location = x;
  r.chart = chart;
  r.sphere = chart == ChartTag::Standard ? stereographic(x) : inverted_chart_inv(x);
  r.residual = norm(f(x) - x);
  r.jacobian = detail::map_jacobian(f, x, rel_step);
  r.eigenvalues = eigenvalues(r.jacobian);
  r.morse_index = 0;
  for (const auto& z : r.eigenvalues)
    if (std::abs(z) > 1.0) ++r.morse_index;
  r.kind = r.morse_index == 0 ? FixedPointKind::Sink : (r.morse_index == 3 ? FixedPointKind::Source : FixedPointKind::Saddle);
  return r;
}

/// Newton iteration on F(x) = f(x) - x from the known seeds (O, Z(P1),
/// Z(P2), N) and a coarse grid around the tube's first periods.
inline FixedPointCensus find_fixed_points(const SphereMap& sm, const FixedPointOptions& opt = {}) {
  const RealizedMap& m = sm.realized();
  auto fs = [&](const Point3& x) { return sm.eval_standard(x); };
  auto fi = [&](const Point3& w) { return sm.eval_inverted(w); };

  struct Seed {
    Point3 x;
    ChartTag chart;
  };
  std::vector<Seed> seeds{{Point3{}, ChartTag::Standard},
                          {m.saddle(Saddle::P1), ChartTag::Standard},
                          {m.saddle(Saddle::P2), ChartTag::Standard},
                          {Point3{}, ChartTag::Inverted}};
  const double extent = 1.5 * std::max(norm(m.saddle(Saddle::P1)), norm(m.saddle(Saddle::P2)));
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j)
      for (int k = 0; k < opt.grid; ++k) {
        auto c = [&](int a) { return extent * (2.0 * (a + 0.5) / opt.grid - 1.0); };
        seeds.push_back({{c(i), c(j), c(k)}, ChartTag::Standard});
      }

  FixedPointCensus out;
  for (const auto& s : seeds) {
    ++out.seeds;
    std::optional<Point3> x;
    try {
      x = s.chart == ChartTag::Standard ? detail::newton_fixed_point(fs, s.x, opt)
                                        : detail::newton_fixed_point(fi, s.x, opt);
    } catch (const EvaluationError&) {
      continue;  // a seed that wanders into a failed chart lookup is dropped
    }
    if (!x) continue;
    ++out.converged;
    const SpherePoint4 y = s.chart == ChartTag::Standard ? stereographic(*x) : inverted_chart_inv(*x);
    bool dup = false;
    for (const auto& p : out.points)
      if (distance(p.sphere, y) < opt.dedup) dup = true;
    if (dup) continue;
    out.points.push_back(s.chart == ChartTag::Standard ? classify_fixed_point(fs, *x, s.chart, opt.fd_step)
                                                       : classify_fixed_point(fi, *x, s.chart, opt.fd_step));
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const auto& a, const auto& b) { return a.morse_index < b.morse_index; });
  return out;
}

// ---------------------------------------------------------------------------
// Orbit-space projection of the sink basin

enum class BasinStatus { InBasin, NotInBasin, Origin };

struct BasinOptions {
  int budget = 400;
  double saddle_guard = 1e-3;  // chart units around each saddle
};

struct BasinResult {
  BasinStatus status = BasinStatus::NotInBasin;
  OrbitSpacePoint point;
  int iterations = 0;
  std::string reason;
};

namespace detail {

struct SaddleGuard {
  Point3 p1, p2;
  double r1 = 0.0, r2 = 0.0;  // physical guard radii

  SaddleGuard(const RealizedMap& m, double chart_radius)
      : p1(m.saddle(Saddle::P1)),
        p2(m.saddle(Saddle::P2)),
        r1(chart_radius * 0.5 * m.chart().radius(kSaddleP1.x1)),
        r2(chart_radius * 0.5 * m.chart().radius(kSaddleP2.x1)) {}

  const char* hit(const Point3& y) const {
    if (norm(y - p1) < r1) return "orbit approaches the index-1 saddle";
    if (norm(y - p2) < r2) return "orbit approaches the index-2 saddle";
    return nullptr;
  }
};

}  // namespace detail

/// p_omega(x): iterate until the orbit enters the safe ball B, where f = a,
/// then project. Orbits that come close to a saddle are reported as not in
/// the basin: they lie near a stable manifold and cannot be certified.
inline BasinResult basin_projection(const RealizedMap& m, const Point3& x, const BasinOptions& opt = {}) {
  BasinResult r;
  if (norm(x) == 0.0) {
    r.status = BasinStatus::Origin;
    r.reason = "the sink itself";
    return r;
  }
  const detail::SaddleGuard guard(m, opt.saddle_guard);
  const double ball = m.safe_ball_radius();
  Point3 y = x;
  for (int k = 0; k <= opt.budget; ++k) {
    if (norm(y) < ball) {
      r.status = BasinStatus::InBasin;
      r.point = project_p(y);
      r.iterations = k;
      return r;
    }
    if (const char* why = guard.hit(y)) {
      r.reason = why;
      r.iterations = k;
      return r;
    }
    if (k == opt.budget) break;
    y = m.eval_forward(y);
  }
  r.iterations = opt.budget;
  r.reason = "iteration budget exhausted before reaching the safe ball";
  return r;
}

// ---------------------------------------------------------------------------
// Separatrices and invariant knots

struct SeparatrixOptions {
  double epsilon = 1e-6;          // seed offset in chart units
  int samples_per_segment = 1000;  // points per fundamental segment
  int budget = 200;               // iterations of f
};

struct SeparatrixTrace {
  Saddle saddle = Saddle::P1;
  int branch = 1;
  std::vector<Point3> polyline;
  std::vector<std::size_t> markers;  // polyline index where each iterate of f starts
  std::vector<Point3> iterates;      // f^k(seed), one per segment, plus the last image
  bool converged = false;            // last segment lies in the safe ball
  double max_chart_radius = 0.0;     // along the trace
  double closest_p1 = std::numeric_limits<double>::infinity();  // chart distance of later iterates to P1
  std::string reason;

  /// Points of the final fundamental segment, closed by the image of its start.
  std::vector<Point3> final_segment() const {
    if (markers.empty()) return {};
    std::vector<Point3> seg(polyline.begin() + static_cast<std::ptrdiff_t>(markers.back()), polyline.end());
    return seg;
  }
};

namespace detail {

/// Unit-time chart flow from c sampled at `k` equal steps (k + 1 points).
inline std::vector<CylinderPoint> flow_samples(const PhiField& field, CylinderPoint c, int k, const FlowOptions& fo) {
  std::vector<CylinderPoint> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  out.push_back(c);
  if (field.translation_only(c, 1.0, fo.raw)) {
    for (int j = 1; j <= k; ++j) out.push_back(flow_g(c, static_cast<double>(j) / k));
    return out;
  }
  // the sampling step doubles as the integration step when fine enough
  const int sub = std::max(1, static_cast<int>(std::ceil(1.0 / (k * fo.step) - 1e-9)));
  const double h = 1.0 / (static_cast<double>(k) * sub);
  for (int j = 0; j < k; ++j) {
    for (int s = 0; s < sub; ++s) {
      const Vec3 k1 = field.velocity(c, fo.raw);
      const Vec3 k2 = field.velocity(c + (0.5 * h) * k1, fo.raw);
      const Vec3 k3 = field.velocity(c + (0.5 * h) * k2, fo.raw);
      const Vec3 k4 = field.velocity(c + h * k3, fo.raw);
      c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(c);
  }
  return out;
}

/// Follow the f-orbit of `seed` and densify each step by the chart flow.
inline SeparatrixTrace trace_from(const RealizedMap& m, const Point3& seed, const SeparatrixOptions& opt) {
  SeparatrixTrace tr;
  const double ball = m.safe_ball_radius();
  const int k = opt.samples_per_segment;
  Point3 x = seed;
  for (int it = 0; it < opt.budget; ++it) {
    const auto inv = m.chart().inverse(x);
    if (inv.status != TubeStatus::InTube) {
      tr.reason = "trace left the tube";
      return tr;
    }
    const auto path = flow_samples(m.field(), inv.point, k, m.options().flow);
    tr.markers.push_back(tr.polyline.size());
    tr.iterates.push_back(x);
    if (it > 0) tr.closest_p1 = std::min(tr.closest_p1, norm(inv.point - kSaddleP1));
    bool inside = true;
    for (int j = 0; j < k; ++j) {
      const Point3 p = m.chart().map_unchecked(path[static_cast<std::size_t>(j)]);
      tr.polyline.push_back(p);
      tr.max_chart_radius = std::max(tr.max_chart_radius, radial(path[static_cast<std::size_t>(j)]));
      if (!(norm(p) < ball)) inside = false;
    }
    const Point3 next = m.eval_forward(x);
    if (inside) {
      tr.iterates.push_back(next);
      tr.converged = true;
      return tr;
    }
    x = next;
  }
  tr.reason = "iteration budget exhausted";
  return tr;
}

}  // namespace detail

/// Unit unstable direction of the index-1 saddle, oriented along the chart's
/// +x3 direction for branch +1.
inline Vec3 unstable_direction(const RealizedMap& m, double rel_step = 1e-6) {
  const Point3 s = m.saddle(Saddle::P1);
  const Mat3 j = detail::map_jacobian([&](const Point3& y) { return m.eval_forward(y); }, s, rel_step);
  const auto ev = eigenvalues(j);
  Vec3 v = eigenvector(j, ev[2].real());
  const Vec3 e2 = m.chart().frame(kSaddleP1.x1).e2;
  return dot(v, e2) < 0.0 ? -v : v;
}

inline SeparatrixTrace trace_separatrix(const RealizedMap& m, int branch, const SeparatrixOptions& opt = {}) {
  const Point3 s = m.saddle(Saddle::P1);
  const Vec3 v = unstable_direction(m);
  const double scale = 0.5 * m.chart().radius(kSaddleP1.x1);
  const Point3 seed = s + (branch >= 0 ? 1.0 : -1.0) * opt.epsilon * scale * v;
  SeparatrixTrace tr = detail::trace_from(m, seed, opt);
  tr.saddle = Saddle::P1;
  tr.branch = branch >= 0 ? 1 : -1;
  return tr;
}

struct KnotInvariantResult {
  HopfKnotCurve knot;
  int degree = 0;
  double hausdorff_to_reference = std::numeric_limits<double>::quiet_NaN();
  double r0 = 0.0;
  double closure_residual = std::numeric_limits<double>::infinity();
  bool closed = false;
  double richardson = std::numeric_limits<double>::quiet_NaN();  // Hausdorff change under epsilon/2
  SeparatrixTrace trace;
  std::string reason;
};

namespace detail {

/// Project the final segment of a converged trace into S^2 x S^1, oriented
/// like the source knot. The segment runs toward O, which decreases the
/// circle coordinate, so a degree +1 source needs the reverse order.
inline std::optional<HopfKnotCurve> project_segment(const RealizedMap& m, const SeparatrixTrace& tr, std::string name,
                                                    double& closure) {
  const auto seg = tr.final_segment();
  if (seg.empty() || tr.iterates.empty()) return std::nullopt;
  HopfKnotCurve k{std::move(name), {}, m.source_degree()};
  k.samples.reserve(seg.size() + 1);
  for (const auto& p : seg) k.samples.push_back(project_p(p));
  closure = orbit_space_distance(project_p(tr.iterates.back()), k.samples.front());
  if (m.source_degree() == 1) std::reverse(k.samples.begin(), k.samples.end());
  k.samples.push_back(k.samples.front());
  return k;
}

}  // namespace detail

struct ExtractOptions {
  SeparatrixOptions separatrix{};
  double weld_tolerance = 1e-6;
  bool richardson = true;
};

/// L^i_f: the projection of one fundamental segment of a separatrix.
inline KnotInvariantResult extract_invariant_knot(const RealizedMap& m, int branch,
                                                  const HopfKnotCurve* reference = nullptr,
                                                  const ExtractOptions& opt = {}) {
  KnotInvariantResult res;
  res.r0 = m.chart().r0();
  res.trace = trace_separatrix(m, branch, opt.separatrix);
  if (!res.trace.converged) {
    res.reason = "separatrix did not reach the safe ball: " + res.trace.reason;
    return res;
  }
  const std::string name = m.name() + (branch >= 0 ? "_sep+" : "_sep-");
  auto k = detail::project_segment(m, res.trace, name, res.closure_residual);
  if (!k) {
    res.reason = "empty segment";
    return res;
  }
  if (!(res.closure_residual <= opt.weld_tolerance)) {
    res.reason = "open loop: closure residual " + std::to_string(res.closure_residual);
    return res;
  }
  res.closed = true;
  res.knot = std::move(*k);
  try {
    res.degree = s1_degree(res.knot);
  } catch (const KnotError& e) {
    res.reason = e.what();
    return res;
  }
  if (reference) res.hausdorff_to_reference = hausdorff_distance(res.knot, *reference);
  if (opt.richardson) {
    SeparatrixOptions half = opt.separatrix;
    half.epsilon *= 0.5;
    const auto tr = trace_separatrix(m, branch, half);
    double closure = 0.0;
    if (tr.converged) {
      if (auto k2 = detail::project_segment(m, tr, name, closure)) res.richardson = hausdorff_distance(res.knot, *k2);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Unstable surface of the index-2 saddle

struct SurfaceOptions {
  int loops = 16;              // seeds on the circle around the saddle
  double radius = 1e-3;        // circle radius in chart units
  SeparatrixOptions trace{1e-6, 400, 200};
  double saddle_guard = 1e-3;  // chart distance to P1 marking the heteroclinic direction
};

struct SurfaceLoop {
  double angle = 0.0;  // seed angle in the unstable plane (0 = +x1, pi/2 = +x3)
  BasinStatus status = BasinStatus::NotInBasin;
  HopfKnotCurve loop;
  int degree = 0;
  std::string reason;
};

struct UnstableSurface {
  std::vector<SurfaceLoop> loops;
  std::vector<OrbitSpacePoint> cloud;
};

/// C_f sampled by flow lines through a small circle in the unstable plane of
/// Z(P2). Each flow line is an invariant curve; its fundamental segment in
/// the safe ball projects to a closed loop of C_f.
inline UnstableSurface project_unstable_surface(const RealizedMap& m, const SurfaceOptions& opt = {}) {
  UnstableSurface out;
  for (int i = 0; i < opt.loops; ++i) {
    SurfaceLoop l;
    l.angle = 2.0 * std::numbers::pi * i / opt.loops;
    const CylinderPoint c = kSaddleP2 + opt.radius * Vec3{std::cos(l.angle), 0.0, std::sin(l.angle)};
    const auto tr = detail::trace_from(m, m.chart().map(c), opt.trace);
    const bool near_saddle = tr.closest_p1 < opt.saddle_guard;
    if (!tr.converged || near_saddle) {
      l.reason = near_saddle ? "flow line runs into the index-1 saddle (heteroclinic direction)" : tr.reason;
      out.loops.push_back(std::move(l));
      continue;
    }
    double closure = 0.0;
    auto k = detail::project_segment(m, tr, m.name() + "_C" + std::to_string(i), closure);
    if (!k || closure > 1e-6) {
      l.reason = "open loop";
      out.loops.push_back(std::move(l));
      continue;
    }
    l.status = BasinStatus::InBasin;
    l.loop = std::move(*k);
    l.degree = s1_degree(l.loop);
    for (const auto& p : l.loop.samples) out.cloud.push_back(p);
    out.loops.push_back(std::move(l));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heteroclinic curve

struct HeteroclinicOptions {
  int samples = 20;
  int budget = 200;
  double tolerance = 1e-4;  // chart distance to the saddle
};

struct HeteroclinicSample {
  double x1 = 0.0;
  int forward_iterations = -1;   // to reach P1, -1 if never
  int backward_iterations = -1;  // to reach P2
  double invariance = 0.0;       // chart radius of Z^{-1}(f(Z(x1, 0, 0)))
};

struct HeteroclinicReport {
  std::vector<HeteroclinicSample> samples;
  double max_invariance = 0.0;
  bool ok = false;
  double axis_velocity = 0.0;  // x1-velocity of the field at the chart origin
};

inline HeteroclinicReport verify_heteroclinic(const RealizedMap& m, const HeteroclinicOptions& opt = {}) {
  HeteroclinicReport rep;
  rep.axis_velocity = m.field().velocity(Point3{}).x1;
  rep.ok = true;
  auto chart_of = [&](const Point3& x) {
    const auto inv = m.chart().inverse(x);
    if (inv.status != TubeStatus::InTube) throw EvaluationError("heteroclinic orbit left the tube");
    return inv.point;
  };
  for (int i = 0; i < opt.samples; ++i) {
    HeteroclinicSample s;
    s.x1 = -1.0 + 2.0 * (i + 0.5) / opt.samples;
    const Point3 x0 = m.chart().map({s.x1, 0.0, 0.0});
    s.invariance = radial(chart_of(m.eval_forward(x0)));
    rep.max_invariance = std::max(rep.max_invariance, s.invariance);
    Point3 x = x0;
    for (int k = 1; k <= opt.budget; ++k) {
      x = m.eval_forward(x);
      if (norm(chart_of(x) - kSaddleP1) < opt.tolerance) {
        s.forward_iterations = k;
        break;
      }
    }
    x = x0;
    for (int k = 1; k <= opt.budget; ++k) {
      x = m.eval_inverse(x);
      if (norm(chart_of(x) - kSaddleP2) < opt.tolerance) {
        s.backward_iterations = k;
        break;
      }
    }
    if (s.forward_iterations < 0 || s.backward_iterations < 0 || !(s.invariance < 1e-7)) rep.ok = false;
    rep.samples.push_back(s);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gluing across the tube boundary

struct GluingReport {
  double max_discrepancy = 0.0;  // chart units at the image
  double max_physical = 0.0;
  int samples = 0;
};

/// Compares the two definitions of f on the boundary shell rho in [1.9, 2]:
/// the tube branch Z phi Z^{-1} against a, measured in chart units r(x1+1)/2.
inline GluingReport glued_continuity(const RealizedMap& m, int samples = 1000, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ax(-kBallRadius, kBallRadius);
  std::uniform_real_distribution<double> rad(1.9, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  GluingReport rep;
  for (int i = 0; i < samples; ++i) {
    const double x1 = ax(rng);
    const double rho = rad(rng);
    const double a = ang(rng);
    const CylinderPoint c{x1, rho * std::cos(a), rho * std::sin(a)};
    const Point3 x = m.chart().map(c);
    const Point3 inside = m.chart().map_unchecked(flow_phi(m.field(), c, 1.0, m.options().flow));
    const Point3 outside = contract_a(x);
    const double phys = norm(inside - outside);
    rep.max_physical = std::max(rep.max_physical, phys);
    rep.max_discrepancy = std::max(rep.max_discrepancy, phys / (0.5 * m.chart().radius(x1 + 1.0)));
    ++rep.samples;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Census

struct Tolerances {
  double differential = 1e-9;       // sink 1/2 I and source 2 I
  double saddle_eigen = 1e-4;       // against the analytic linearization
  double heteroclinic = 1e-4;
  double invariance = 1e-7;
  double closure = 1e-6;
  double mutual_factor = 2.0;       // mutual Hausdorff < factor * r0
  double sampling_slack = 1e-2;     // Hausdorff to source < r0 + slack
  double richardson = 1e-4;
  double basin = 1e-6;

  static Tolerances strict() {
    Tolerances t;
    t.differential = 1e-10;
    t.saddle_eigen = 1e-5;
    t.closure = 1e-8;
    t.sampling_slack = 0.0;
    t.basin = 1e-9;
    return t;
  }
};

struct CensusOptions {
  Tolerances tol{};
  FixedPointOptions fixed_points{};
  ExtractOptions extract{};
  HeteroclinicOptions heteroclinic{};
  BasinOptions basin{};
  int basin_samples = 1000;
  std::uint64_t seed = 1;
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerificationSummary {
  std::string knot;
  double r0 = 0.0;
  FixedPointCensus fixed_points;
  HeteroclinicReport heteroclinic;
  KnotInvariantResult invariant_plus;
  KnotInvariantResult invariant_minus;
  double mutual_hausdorff = std::numeric_limits<double>::quiet_NaN();
  std::vector<CriterionResult> criteria;

  bool ok() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
  }
};

/// Largest deviation of a record's eigenvalues from the analytic ones, both
/// sorted by modulus.
inline double eigen_deviation(const FixedPointRecord& r, const std::array<double, 3>& expected) {
  std::array<double, 3> e = expected;
  std::sort(e.begin(), e.end(), [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(r.eigenvalues[i] - e[i]));
  return d;
}

/// Largest entry of J - s I.
inline double scalar_deviation(const FixedPointRecord& r, double s) { return max_abs(r.jacobian - Mat3::identity(s)); }

/// |p_omega(f(x)) - p_omega(x)| over random basin points, drawn in the
/// fundamental shell around the tube's first periods.
inline CriterionResult basin_invariance(const RealizedMap& m, int samples, std::uint64_t seed, const BasinOptions& opt,
                                        double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double extent = 2.0 * norm(m.saddle(Saddle::P1));
  double worst = 0.0;
  int used = 0;
  int drawn = 0;
  while (used < samples && drawn < 20 * samples) {
    ++drawn;
    const Point3 x{extent * u(rng), extent * u(rng), extent * u(rng)};
    const auto a = basin_projection(m, x, opt);
    if (a.status != BasinStatus::InBasin) continue;
    const auto b = basin_projection(m, m.eval_forward(x), opt);
    if (b.status != BasinStatus::InBasin) continue;
    worst = std::max(worst, orbit_space_distance(a.point, b.point));
    ++used;
  }
  return {"basin projection invariance", used == samples && worst < tol, worst, tol,
          std::to_string(used) + " basin points of " + std::to_string(drawn) + " drawn"};
}

/// Fixed points, heteroclinic curve, both separatrix knots and basin
/// invariance, with one pass/fail line per check.
inline VerificationSummary census(const SphereMap& sm, const HopfKnotCurve* source = nullptr,
                                  const CensusOptions& opt = {}) {
  const RealizedMap& m = sm.realized();
  const Tolerances& tol = opt.tol;
  VerificationSummary s;
  s.knot = m.name();
  s.r0 = m.chart().r0();

  s.fixed_points = find_fixed_points(sm, opt.fixed_points);
  const auto& fp = s.fixed_points;
  s.criteria.push_back({"four hyperbolic fixed points, indices {0,1,2,3}", fp.ok(),
                        static_cast<double>(fp.points.size()), 4.0,
                        std::to_string(fp.converged) + " of " + std::to_string(fp.seeds) + " seeds converged"});
  if (fp.ok()) {
    const auto& p = fp.points;
    const double sink = scalar_deviation(p[0], 0.5);
    const double source = scalar_deviation(p[3], 2.0);
    const double d1 = eigen_deviation(p[1], saddle_linearization(Saddle::P1));
    const double d2 = eigen_deviation(p[2], saddle_linearization(Saddle::P2));
    s.criteria.push_back({"sink differential 1/2 I", sink < tol.differential, sink, tol.differential, ""});
    s.criteria.push_back({"source differential 2 I (inverted chart)", source < tol.differential, source,
                          tol.differential, ""});
    s.criteria.push_back({"index-1 saddle eigenvalues", d1 < tol.saddle_eigen, d1, tol.saddle_eigen, ""});
    s.criteria.push_back({"index-2 saddle eigenvalues", d2 < tol.saddle_eigen, d2, tol.saddle_eigen, ""});
  }

  HeteroclinicOptions ho = opt.heteroclinic;
  ho.tolerance = tol.heteroclinic;
  s.heteroclinic = verify_heteroclinic(m, ho);
  int worst_f = 0;
  int worst_b = 0;
  for (const auto& x : s.heteroclinic.samples) {
    worst_f = x.forward_iterations < 0 ? -1 : std::max(worst_f, x.forward_iterations);
    worst_b = x.backward_iterations < 0 ? -1 : std::max(worst_b, x.backward_iterations);
    if (worst_f < 0 || worst_b < 0) break;
  }
  const bool converged = worst_f >= 0 && worst_b >= 0;
  s.criteria.push_back({"heteroclinic axis samples converge to both saddles", converged,
                        static_cast<double>(std::max(worst_f, worst_b)), static_cast<double>(ho.budget),
                        "iterations forward " + std::to_string(worst_f) + ", backward " + std::to_string(worst_b)});
  s.criteria.push_back({"heteroclinic invariance residual", s.heteroclinic.max_invariance < tol.invariance,
                        s.heteroclinic.max_invariance, tol.invariance, ""});

  ExtractOptions eo = opt.extract;
  eo.weld_tolerance = tol.closure;
  s.invariant_plus = extract_invariant_knot(m, 1, source, eo);
  s.invariant_minus = extract_invariant_knot(m, -1, source, eo);
  for (const auto* k : {&s.invariant_plus, &s.invariant_minus}) {
    const std::string b = k == &s.invariant_plus ? "+" : "-";
    s.criteria.push_back({"separatrix " + b + " closes", k->closed, k->closure_residual, tol.closure, k->reason});
    s.criteria.push_back({"separatrix " + b + " degree 1", k->closed && k->degree == 1,
                          static_cast<double>(k->degree), 1.0, ""});
    s.criteria.push_back({"separatrix " + b + " Richardson check", k->richardson < tol.richardson, k->richardson,
                          tol.richardson, "epsilon halved"});
    if (source) {
      const double bound = s.r0 + tol.sampling_slack;
      s.criteria.push_back({"separatrix " + b + " near source knot", k->hausdorff_to_reference < bound,
                            k->hausdorff_to_reference, bound, "r0 plus sampling slack"});
    }
  }
  if (s.invariant_plus.closed && s.invariant_minus.closed) {
    s.mutual_hausdorff = hausdorff_distance(s.invariant_plus.knot, s.invariant_minus.knot);
    const double bound = tol.mutual_factor * s.r0;
    s.criteria.push_back({"separatrix knots within a common solid torus", s.mutual_hausdorff < bound,
                          s.mutual_hausdorff, bound, "mutual Hausdorff distance"});
  }

  if (opt.basin_samples > 0)
    s.criteria.push_back(basin_invariance(m, opt.basin_samples, opt.seed, opt.basin, tol.basin));
  return s;
}

}  // namespace hopfms
