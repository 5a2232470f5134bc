#pragma once

// Sampled knots in S^2 x S^1: the Hopf-knot catalog, the S^1-degree, the
// embedding certificate, Hausdorff distance and the a-equivariant lift.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfms/geometry.hpp"
#include "hopfms/spline.hpp"

namespace hopfms {

/// Closed sampled curve in S^2 x S^1. The last sample repeats the first;
/// the list order is the orientation.
struct HopfKnotCurve {
  std::string name;
  std::vector<OrbitSpacePoint> samples;
  int orientation = 1;

  std::size_t resolution() const { return samples.empty() ? 0 : samples.size() - 1; }
  double closure_residual() const {
    return samples.size() < 2 ? 0.0 : orbit_space_distance(samples.front(), samples.back());
  }
};

class KnotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline HopfKnotCurve reversed(HopfKnotCurve k) {
  std::reverse(k.samples.begin(), k.samples.end());
  k.orientation = -k.orientation;
  return k;
}

// ---------------------------------------------------------------------------
// Degree

/// Net number of turns of the circle coordinate around the closed curve.
inline int s1_degree(const HopfKnotCurve& k) {
  if (k.samples.size() < 3) throw KnotError("s1_degree: curve has fewer than 3 samples");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < k.samples.size(); ++i) {
    const double inc = circle_increment(k.samples[i].c, k.samples[i + 1].c);
    if (std::fabs(inc) >= 0.5 - 1e-12)
      throw KnotError("s1_degree: circle jump of half a turn between samples " + std::to_string(i) + " and " +
                      std::to_string(i + 1) + " (resolution too low to unwrap)");
    total += inc;
  }
  return static_cast<int>(std::lround(total));
}

/// Circle coordinate unwrapped to a continuous real lift, s[0] = c[0].
inline std::vector<double> unwrap_circle(const HopfKnotCurve& k) {
  std::vector<double> s(k.samples.size());
  s[0] = k.samples[0].c;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double c = k.samples[i].c;
    const double inc = circle_increment(k.samples[i - 1].c, c);
    if (std::fabs(inc) >= 0.5 - 1e-12) throw KnotError("unwrap: half-turn jump at sample " + std::to_string(i));
    s[i] = c + std::round(s[i - 1] - c);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Segment geometry. Short segments are handled in the chart S^2 x S^1 ->
// R^3 x R (unit vector, unwrapped circle coordinate); distances reported are
// product-metric distances evaluated at the chart-closest points.

namespace detail {

using Vec4 = std::array<double, 4>;

inline Vec4 chart4(const OrbitSpacePoint& p, double c) { return {p.u.x1, p.u.x2, p.u.x3, c}; }

inline double dot4(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}
inline Vec4 sub4(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }
inline Vec4 lerp4(const Vec4& a, const Vec4& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2]), a[3] + t * (b[3] - a[3])};
}

inline OrbitSpacePoint from_chart4(const Vec4& v) {
  const Vec3 u{v[0], v[1], v[2]};
  return {normalized(u), wrap_unit(v[3])};
}

/// Closest parameters (s, t) in [0,1]^2 between segments P0P1 and Q0Q1.
inline std::pair<double, double> closest_params(const Vec4& p0, const Vec4& p1, const Vec4& q0, const Vec4& q1) {
  const Vec4 d1 = sub4(p1, p0);
  const Vec4 d2 = sub4(q1, q0);
  const Vec4 r = sub4(p0, q0);
  const double a = dot4(d1, d1);
  const double e = dot4(d2, d2);
  const double f = dot4(d2, r);
  constexpr double eps = 1e-300;
  double s = 0.0;
  double t = 0.0;
  if (a <= eps && e <= eps) return {0.0, 0.0};
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
    return {0.0, t};
  }
  const double c = dot4(d1, r);
  if (e <= eps) {
    s = std::clamp(-c / a, 0.0, 1.0);
    return {s, 0.0};
  }
  const double b = dot4(d1, d2);
  const double denom = a * e - b * b;
  s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
  t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return {s, t};
}

inline double closest_point_param(const Vec4& x, const Vec4& q0, const Vec4& q1) {
  const Vec4 d = sub4(q1, q0);
  const double e = dot4(d, d);
  if (e <= 1e-300) return 0.0;
  return std::clamp(dot4(sub4(x, q0), d) / e, 0.0, 1.0);
}

/// Segment i of a curve in chart coordinates, with circle coordinates
/// unwrapped so the segment starts within half a turn of `near_c`.
inline std::pair<Vec4, Vec4> chart_segment(const HopfKnotCurve& k, std::size_t i, double near_c) {
  const auto& a = k.samples[i];
  const auto& b = k.samples[i + 1];
  const double ca = near_c + circle_increment(near_c, a.c);
  const double cb = ca + circle_increment(a.c, b.c);
  return {chart4(a, ca), chart4(b, cb)};
}

inline double segment_distance(const HopfKnotCurve& a, std::size_t i, const HopfKnotCurve& b, std::size_t j) {
  const auto [p0, p1] = chart_segment(a, i, a.samples[i].c);
  double best = std::numeric_limits<double>::infinity();
  auto [b0, b1] = chart_segment(b, j, p0[3]);
  // the second segment may be closest through a neighbouring copy of the circle
  for (int shift = -1; shift <= 1; ++shift) {
    Vec4 q0 = b0;
    Vec4 q1 = b1;
    q0[3] += shift;
    q1[3] += shift;
    const auto [s, t] = closest_params(p0, p1, q0, q1);
    best = std::min(best, orbit_space_distance(from_chart4(lerp4(p0, p1, s)), from_chart4(lerp4(q0, q1, t))));
  }
  return best;
}

inline double point_segment_distance(const OrbitSpacePoint& x, const HopfKnotCurve& b, std::size_t j) {
  const Vec4 xp = chart4(x, x.c);
  const auto [q0, q1] = chart_segment(b, j, x.c);
  const double t = closest_point_param(xp, q0, q1);
  return orbit_space_distance(x, from_chart4(lerp4(q0, q1, t)));
}

}  // namespace detail

struct EmbeddingReport {
  double min_clearance = std::numeric_limits<double>::infinity();
  double clearance_tol = 0.0;
  bool ok = false;
  // offending (closest) non-adjacent segment pair
  std::size_t segment_a = 0;
  std::size_t segment_b = 0;
};

inline double max_segment_length(const HopfKnotCurve& k) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < k.samples.size(); ++i)
    m = std::max(m, orbit_space_distance(k.samples[i], k.samples[i + 1]));
  return m;
}

/// Minimum distance between non-adjacent segments that are not simply
/// consecutive pieces of one strand: a pair whose connecting arc is at most
/// pi/2 times their distance (the chord bound of any arc up to a half
/// circle) is local and skipped. A negative tolerance selects the sampling
/// scale (half the longest segment).
inline EmbeddingReport validate_embedding(const HopfKnotCurve& k, double clearance_tol = -1.0) {
  const std::size_t n = k.resolution();
  if (n < 8) throw KnotError("validate_embedding: need at least 8 samples");
  EmbeddingReport rep;
  rep.clearance_tol = clearance_tol < 0.0 ? 0.5 * max_segment_length(k) : clearance_tol;
  // arc[i] = length up to sample i
  std::vector<double> arc(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) arc[i + 1] = arc[i] + orbit_space_distance(k.samples[i], k.samples[i + 1]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing vertex
      const double inner = arc[j] - arc[i + 1];
      const double between = std::min(inner, arc[n] - (arc[j + 1] - arc[i]));
      const double d = detail::segment_distance(k, i, k, j);
      if (between <= 0.5 * std::numbers::pi * d) continue;
      if (d < rep.min_clearance) {
        rep.min_clearance = d;
        rep.segment_a = i;
        rep.segment_b = j;
      }
    }
  }
  rep.ok = rep.min_clearance > rep.clearance_tol;
  return rep;
}

/// Largest distance from a sample of `a` to the polyline `b`.
inline double directed_hausdorff(const HopfKnotCurve& a, const HopfKnotCurve& b) {
  double worst = 0.0;
  for (const auto& x : a.samples) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < b.samples.size(); ++j) {
      // cheap rejection: the circle gap alone bounds the distance from below
      const double gap = std::min(circle_distance(x.c, b.samples[j].c), circle_distance(x.c, b.samples[j + 1].c));
      const double seg_c = std::fabs(circle_increment(b.samples[j].c, b.samples[j + 1].c));
      if (gap - seg_c > best) continue;
      best = std::min(best, detail::point_segment_distance(x, b, j));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff_distance(const HopfKnotCurve& a, const HopfKnotCurve& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// ---------------------------------------------------------------------------
// Catalog

inline HopfKnotCurve standard_hopf(const Vec3& sphere_point, std::size_t resolution, std::string name = "L0") {
  if (resolution < 8) throw KnotError("standard_hopf: resolution must be at least 8");
  const Vec3 u = normalized(sphere_point);
  HopfKnotCurve k{std::move(name), {}, 1};
  k.samples.reserve(resolution + 1);
  for (std::size_t i = 0; i < resolution; ++i)
    k.samples.push_back({u, static_cast<double>(i) / static_cast<double>(resolution)});
  k.samples.push_back(k.samples.front());
  return k;
}

namespace detail {

// Design space for the Mazur family: a disc (X, Y) times the unwrapped
// circle coordinate s. The clasp lives in the levels [0, h] mod 1: a cap in
// the plane Y = 0 hooked through a cup in the plane X = 0. The main band
// (h, 1) carries two forward strands F1, F2 and one backward strand B.
struct MazurDesign {
  double clasp_height = 0.35;
  double disc_scale = 0.25;  // radians per design unit on S^2
  double crossing_x = 1.05;  // where the forward strand crosses the clasp band
  double crossing_y = 1.05;
  double pair_cx = 0.66;     // centre of the F1/F2 twist region
  double pair_cy = 0.66;
  double pair_radius = 0.3;
  double pair_angle = std::numbers::pi / 4;  // F2's starting direction from the centre
  double wind_radius = 0.75;  // radius of B's winding around the pair
  double ramp = 0.5;          // fraction of the band used by each transition
  int twists = 0;             // extra full twists of the forward pair
  int windings = 0;           // full windings of B around the forward pair
};

inline double smootherstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

struct BandPositions {
  double f1x, f1y, f2x, f2y, bx, by;
};

// The pair rotates about its centre over the whole band; the offsets from
// the clasp endpoints fade out (in) over the first (last) `ramp` of it, so
// lateral motion never stops and restarts.
inline BandPositions band_positions(const MazurDesign& d, double sigma) {
  const double w = d.ramp;
  const double cx = d.pair_cx;
  const double cy = d.pair_cy;
  const double r = d.pair_radius;
  const double fade_in = 1.0 - smootherstep(sigma / w);
  const double fade_out = smootherstep((sigma - 1.0 + w) / w);
  // a half twist exchanges the pair; each extra twist adds a full turn
  const double psi = d.pair_angle + std::numbers::pi * (1.0 + 2.0 * d.twists) * smootherstep(sigma);
  const double ex = r * std::cos(psi);
  const double ey = r * std::sin(psi);
  // pair points at sigma = 0; they trade places by sigma = 1
  const double px = cx - r * std::cos(d.pair_angle);
  const double py = cy - r * std::sin(d.pair_angle);
  const double qx = 2.0 * cx - px;
  const double qy = 2.0 * cy - py;
  BandPositions p{};
  p.f1x = cx - ex + fade_in * (0.0 - px) + fade_out * (d.crossing_x - qx);
  p.f1y = cy - ey + fade_in * (1.0 - py) + fade_out * (d.crossing_y - qy);
  p.f2x = cx + ex + fade_in * (d.crossing_x - qx) + fade_out * (1.0 - px);
  p.f2y = cy + ey + fade_in * (d.crossing_y - qy) + fade_out * (0.0 - py);
  if (d.windings == 0) {
    const double t = smootherstep(sigma);
    p.bx = -t;
    p.by = t - 1.0;
  } else {
    const double rw = d.wind_radius;
    const double beta = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * d.windings * smootherstep(sigma);
    p.bx = cx + rw * std::cos(beta) + fade_in * (0.0 - cx) + fade_out * (-1.0 - cx);
    p.by = cy + rw * std::sin(beta) + fade_in * (-1.0 - (cy - rw)) + fade_out * (0.0 - (cy - rw));
  }
  return p;
}

/// Dense samples (X, Y, s) of one period, s running from 0 to 1.
inline std::vector<Vec3> mazur_design_curve(const MazurDesign& d, std::size_t per_piece) {
  const double h = d.clasp_height;
  const double pi = std::numbers::pi;
  std::vector<Vec3> pts;
  auto piece = [&](auto f) {
    for (std::size_t i = 0; i < per_piece; ++i) pts.push_back(f(static_cast<double>(i) / per_piece));
  };
  // right half of the cup, from its bottom
  piece([&](double t) { const double a = t * pi / 2; return Vec3{0.0, std::sin(a), h * (1.0 - std::cos(a))}; });
  piece([&](double t) {
    const auto p = band_positions(d, t);
    return Vec3{p.f1x, p.f1y, h + t * (1.0 - h)};
  });
  piece([&](double t) { return Vec3{d.crossing_x, d.crossing_y, 1.0 + t * h}; });
  piece([&](double t) {
    const auto p = band_positions(d, t);
    return Vec3{p.f2x, p.f2y, 1.0 + h + t * (1.0 - h)};
  });
  // cap
  piece([&](double t) { const double a = t * pi; return Vec3{std::cos(a), 0.0, 2.0 + h * std::sin(a)}; });
  piece([&](double t) {
    const auto p = band_positions(d, 1.0 - t);
    return Vec3{p.bx, p.by, 2.0 - t * (1.0 - h)};
  });
  // left half of the cup, down to its bottom one level up
  piece([&](double t) {
    const double a = (1.0 - t) * pi / 2;
    return Vec3{0.0, -std::sin(a), 1.0 + h * (1.0 - std::cos(a))};
  });
  return pts;
}

inline HopfKnotCurve design_to_knot(const MazurDesign& d, std::size_t resolution, std::string name) {
  if (resolution < 8) throw KnotError("mazur family: resolution must be at least 8");
  // centre of the design disc, mapped to the north pole
  constexpr double ox = -0.2;
  constexpr double oy = 0.7;
  const auto dense = mazur_design_curve(d, 4000);
  const std::size_t m = dense.size();
  auto at = [&](std::size_t i) {
    // periodic extension: one period up in s
    const std::size_t k = i / m;
    Vec3 p = dense[i % m];
    p.x3 += static_cast<double>(k);
    return p;
  };
  // arc length in the local geometry of the lift: lateral angle vs ln2 * s
  auto metric_pt = [&](const Vec3& p) {
    return Vec3{d.disc_scale * p.x1, d.disc_scale * p.x2, std::numbers::ln2 * p.x3};
  };
  std::vector<double> arc(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) arc[i + 1] = arc[i] + norm(metric_pt(at(i + 1)) - metric_pt(at(i)));
  const double total = arc[m];

  HopfKnotCurve k{std::move(name), {}, 1};
  k.samples.reserve(resolution + 1);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < resolution; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(resolution);
    while (arc[seg + 1] < target) ++seg;
    const double w = (target - arc[seg]) / (arc[seg + 1] - arc[seg]);
    const Vec3 p = at(seg) + w * (at(seg + 1) - at(seg));
    const Vec3 u = normalized(Vec3{d.disc_scale * (p.x1 - ox), d.disc_scale * (p.x2 - oy), 1.0});
    k.samples.push_back({u, wrap_unit(p.x3)});
  }
  k.samples.push_back(k.samples.front());
  return k;
}

}  // namespace detail

/// Strand winding once around the S^1 factor with a single clasp
/// (wrapping number three).
inline HopfKnotCurve mazur_knot(std::size_t resolution) {
  return detail::design_to_knot(detail::MazurDesign{}, resolution, "LM");
}

/// Mazur knot with n extra full twists of the two forward strands.
inline HopfKnotCurve generalized_mazur(int n, std::size_t resolution) {
  if (n < 1) throw KnotError("generalized_mazur: n must be positive");
  detail::MazurDesign d;
  d.twists = n;
  return detail::design_to_knot(d, resolution, "LM_n" + std::to_string(n));
}

/// Mazur knot whose backward strand winds k times around the forward pair.
inline HopfKnotCurve generalized_mazur_k(int k, std::size_t resolution) {
  if (k < 1) throw KnotError("generalized_mazur_k: k must be positive");
  detail::MazurDesign d;
  d.windings = k;
  return detail::design_to_knot(d, resolution, "LM_k" + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Lift

/// The a-invariant curve p^{-1}(L) in R^3, parametrized so that
/// lambda(t + 1) = lambda(t) / 2. Nodes sit at t_i = phase + i/N.
class EquivariantCurve {
 public:
  EquivariantCurve() = default;
  EquivariantCurve(std::vector<Vec3> period_samples, double phase)
      : spline_(period_samples, 0.5), phase_(phase) {
    log_offset_min_ = std::numeric_limits<double>::infinity();
    log_offset_max_ = -std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(period_samples.size());
    for (std::size_t i = 0; i < period_samples.size(); ++i) {
      // -log2|lambda(t_i)| - t_i
      const double off = -std::log2(norm(period_samples[i])) - (phase_ + static_cast<double>(i) / n);
      log_offset_min_ = std::min(log_offset_min_, off);
      log_offset_max_ = std::max(log_offset_max_, off);
    }
  }

  Vec3 operator()(double t) const { return spline_.value(t - phase_); }
  Vec3 tangent(double t) const { return spline_.derivative(t - phase_); }
  Vec3 second_derivative(double t) const { return spline_.second_derivative(t - phase_); }

  double phase() const { return phase_; }
  std::size_t period_samples() const { return spline_.size(); }
  const std::vector<Vec3>& samples() const { return spline_.nodes(); }
  double node_parameter(std::size_t i) const {
    return phase_ + static_cast<double>(i) / static_cast<double>(spline_.size());
  }
  /// Bounds of -log2|lambda(t)| - t over the nodes.
  double log_offset_min() const { return log_offset_min_; }
  double log_offset_max() const { return log_offset_max_; }

 private:
  EquivariantSpline spline_;
  double phase_ = 0.0;
  double log_offset_min_ = 0.0;
  double log_offset_max_ = 0.0;
};

/// Lift of a Hopf knot: lambda_i = 2^{s_i} u_i with s the unwrapped circle
/// coordinate, so that project_p(lambda_i) is the i-th sample. Moving toward
/// the origin lowers log2|x|, so a curve with lambda(t+1) = lambda(t)/2 runs
/// through the knot against a degree +1 orientation; such curves are
/// traversed backwards.
inline EquivariantCurve lift_to_r3(const HopfKnotCurve& k) {
  const int deg = s1_degree(k);
  if (deg != 1 && deg != -1)
    throw KnotError("lift_to_r3: S1-degree is " + std::to_string(deg) + ", a Hopf knot needs +-1");
  const HopfKnotCurve oriented = deg == -1 ? k : reversed(k);
  const auto s = unwrap_circle(oriented);
  const std::size_t n = oriented.resolution();
  std::vector<Vec3> nodes(n);
  // phase = max(-s_i - i/N), so -log2|lambda(t)| <= t at the nodes and the
  // tube radius r0 * 2^{-t} never exceeds r0 * |lambda(t)|
  double phase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = std::exp2(s[i]) * oriented.samples[i].u;
    phase = std::max(phase, -s[i] - static_cast<double>(i) / static_cast<double>(n));
  }
  return EquivariantCurve(std::move(nodes), phase);
}

}  // namespace hopfms
