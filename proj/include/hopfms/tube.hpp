#pragma once

// a-equivariant tubular neighbourhood of a lifted Hopf knot.
//
// The chart Z : C -> R^3 \ {O} on the cylinder C = {x2^2 + x3^2 <= 4} is
//
//   Z(x1, x2, x3) = lambda(x1) + r(x1)/2 * (x2 e1(x1) + x3 e2(x1)),
//   r(t) = r0 * 2^{-t},
//
// with a 1-periodic normal frame (e1, e2). Since lambda(t+1) = lambda(t)/2,
// Z(x1 + 1, x2, x3) = Z(x1, x2, x3) / 2: Z conjugates the unit translation
// with the contraction a.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfms/geometry.hpp"
#include "hopfms/knots.hpp"
#include "hopfms/spline.hpp"

namespace hopfms {

/// Point of the model cylinder (axial x1, transverse x2, x3).
using CylinderPoint = Vec3;

inline constexpr double kCylinderRadius = 2.0;

inline double radial(const CylinderPoint& p) { return std::hypot(p.x2, p.x3); }

class TubeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rotation of v about the unit axis k by angle a.
inline Vec3 rotate_about(const Vec3& v, const Vec3& k, double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return c * v + s * cross(k, v) + (1.0 - c) * dot(k, v) * k;
}

struct FramedCurve {
  EquivariantCurve curve;
  std::vector<Vec3> e1;  // corrected frame at the nodes of one period
  double holonomy = 0.0;   // transported frame angle after one period, about the tangent
  double rotation = 0.0;   // constant rotation applied to the closed frame
};

namespace detail {

inline Vec3 unit_tangent(const EquivariantCurve& c, double t) {
  const Vec3 d = c.tangent(t);
  const double n = norm(d);
  if (!(n > 0.0) || !std::isfinite(n)) throw TubeError("build_frame: vanishing tangent at t = " + std::to_string(t));
  return d / n;
}

/// Initial normal: the coordinate axis least aligned with the tangent,
/// projected off it.
inline Vec3 initial_normal(const Vec3& tangent) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::fabs(tangent[i]) < std::fabs(tangent[best]) - 1e-12) best = i;
  Vec3 axis{};
  axis[best] = 1.0;
  return normalized(axis - dot(axis, tangent) * tangent);
}

/// Double-reflection transport of `r` over `periods` periods starting at
/// node 0. Returns the transported vectors at every visited node.
inline std::vector<Vec3> transport(const EquivariantCurve& c, Vec3 r, int periods) {
  const std::size_t n = c.period_samples();
  const std::size_t steps = n * static_cast<std::size_t>(periods);
  std::vector<Vec3> out;
  out.reserve(steps + 1);
  out.push_back(r);
  const double t0 = c.node_parameter(0);
  Vec3 x_prev = c(t0);
  Vec3 tan_prev = unit_tangent(c, t0);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = t0 + static_cast<double>(i) / static_cast<double>(n);
    const Vec3 x = c(t);
    const Vec3 tan = unit_tangent(c, t);
    if (dot(tan, tan_prev) < std::cos(0.5))
      throw TubeError("build_frame: tangent turns by more than 0.5 rad between nodes " + std::to_string(i - 1) +
                      " and " + std::to_string(i));
    const Vec3 v1 = x - x_prev;
    const double c1 = dot(v1, v1);
    const Vec3 r_l = r - (2.0 / c1) * dot(v1, r) * v1;
    const Vec3 t_l = tan_prev - (2.0 / c1) * dot(v1, tan_prev) * v1;
    const Vec3 v2 = tan - t_l;
    const double c2 = dot(v2, v2);
    r = c2 > 0.0 ? r_l - (2.0 / c2) * dot(v2, r_l) * v2 : r_l;
    r = normalized(r - dot(r, tan) * tan);
    out.push_back(r);
    x_prev = x;
    tan_prev = tan;
  }
  return out;
}

inline double signed_angle(const Vec3& from, const Vec3& to, const Vec3& axis) {
  return std::atan2(dot(cross(from, to), axis), dot(from, to));
}

}  // namespace detail

/// Rotation-minimizing frame along one period, closed by distributing the
/// holonomy angle linearly over the nodes.
inline FramedCurve build_frame(const EquivariantCurve& c) {
  const std::size_t n = c.period_samples();
  if (n < 64) throw TubeError("build_frame: need at least 64 samples per period");
  const double t0 = c.node_parameter(0);
  const Vec3 tan0 = detail::unit_tangent(c, t0);
  const auto r = detail::transport(c, detail::initial_normal(tan0), 1);
  // tangent directions are a-invariant, so node n has tangent tan0
  const double hol = detail::signed_angle(r.front(), r.back(), tan0);
  FramedCurve f{c, {}, hol};
  f.e1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 tan = detail::unit_tangent(c, c.node_parameter(i));
    f.e1[i] = rotate_about(r[i], tan, -hol * static_cast<double>(i) / static_cast<double>(n));
  }
  return f;
}

/// Rotates the whole frame by a constant angle about the tangent.
inline void rotate_frame(FramedCurve& f, double angle) {
  for (std::size_t i = 0; i < f.e1.size(); ++i)
    f.e1[i] = rotate_about(f.e1[i], detail::unit_tangent(f.curve, f.curve.node_parameter(i)), angle);
  f.rotation += angle;
}

/// Worst metric size in S^2 x S^1 of a unit displacement along e2 rotated by
/// `angle`, in units of the relative tube radius r(t)/|lambda(t)| scaled by
/// 1/r0. Radial displacements cost 1/ln 2 in the circle factor.
inline double radial_exposure(const FramedCurve& f, double angle) {
  const double k = 1.0 / (std::numbers::ln2 * std::numbers::ln2) - 1.0;
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.e1.size(); ++i) {
    const double t = f.curve.node_parameter(i);
    const Vec3 x = f.curve(t);
    const Vec3 tan = detail::unit_tangent(f.curve, t);
    const Vec3 e2 = cross(tan, f.e1[i]);
    const double c = (ca * dot(e2, x) - sa * dot(f.e1[i], x)) / norm(x);
    worst = std::max(worst, std::exp2(-t) / norm(x) * std::sqrt(1.0 + k * c * c));
  }
  return worst;
}

/// Picks the constant rotation that keeps e2 lateral where the tube is
/// relatively thickest, so displacements along e2 stay short in the metric.
inline double orient_frame(FramedCurve& f, int steps = 180) {
  double best = radial_exposure(f, 0.0);
  double best_angle = 0.0;
  for (int j = 1; j < steps; ++j) {
    const double a = std::numbers::pi * j / steps;
    const double e = radial_exposure(f, a);
    if (e < best - 1e-12) {
      best = e;
      best_angle = a;
    }
  }
  if (best_angle != 0.0) rotate_frame(f, best_angle);
  return best;
}

/// Holonomy of the transported frame after `periods` periods.
inline double transport_holonomy(const EquivariantCurve& c, int periods) {
  const Vec3 tan0 = detail::unit_tangent(c, c.node_parameter(0));
  const auto r = detail::transport(c, detail::initial_normal(tan0), periods);
  return detail::signed_angle(r.front(), r.back(), tan0);
}

struct RadiusCertificate {
  double r0 = 0.0;          // chosen base radius, after the safety factor
  double r_sup = 0.0;       // supremum of admissible radii
  double clearance = 0.0;   // min over non-adjacent stations of (gap / |lambda|) at r0
  std::string limited_by;   // which constraint set r_sup
};

struct RadiusOptions {
  double r_max = 0.5;
  double safety = 0.8;
  double curvature_bound = 0.5;   // curvature * radius must stay below this
  double origin_bound = 0.5;      // radius / |lambda| must stay below this
  double window = 3.0;            // stations closer than window * (R_i + R_j) along the curve are adjacent
};

namespace detail {

struct Station {
  Vec3 p;
  double scale;  // 2^{-t}
  double arc;
};

inline std::vector<Station> stations(const EquivariantCurve& c, int periods) {
  const std::size_t n = c.period_samples();
  std::vector<Station> st;
  st.reserve(n * periods);
  double arc = 0.0;
  for (int k = 0; k < periods; ++k) {
    const double s = std::exp2(-static_cast<double>(k));
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 p = c.samples()[i] * s;
      if (!st.empty()) arc += norm(p - st.back().p);
      st.push_back({p, std::exp2(-c.node_parameter(i) - k), arc});
    }
  }
  return st;
}

}  // namespace detail

/// Largest admissible base radius and its clearance certificate.
///
/// Station pairs far apart along the curve must have disjoint balls of
/// radius r(t); nearby stations are covered by the curvature bound. The
/// admissible set is (0, r_sup] with r_sup the minimum of the individual
/// pair bounds, which is the limit a bisection on the predicate converges
/// to. Checking stations of period 0 against periods 0..2 suffices: any
/// other pair is a power-of-two rescaling of one of these, or separated by
/// norm (asserted below).
inline RadiusCertificate choose_radius(const FramedCurve& f, const RadiusOptions& opt = {}) {
  const EquivariantCurve& c = f.curve;
  const std::size_t n = c.period_samples();
  RadiusCertificate cert;
  cert.r_sup = opt.r_max;
  cert.limited_by = "r_max";
  for (std::size_t i = 0; i < n; ++i) {
    const double t = c.node_parameter(i);
    const Vec3 d1 = c.tangent(t);
    const Vec3 d2 = c.second_derivative(t);
    const double sp = norm(d1);
    const double kappa = norm(cross(d1, d2)) / (sp * sp * sp);
    const double scale = std::exp2(-t);
    if (kappa > 0.0 && opt.curvature_bound / (kappa * scale) < cert.r_sup) {
      cert.r_sup = opt.curvature_bound / (kappa * scale);
      cert.limited_by = "curvature at node " + std::to_string(i);
    }
    const double origin = opt.origin_bound * norm(c.samples()[i]) / scale;
    if (origin < cert.r_sup) {
      cert.r_sup = origin;
      cert.limited_by = "origin";
    }
  }
  const auto st = detail::stations(c, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < st.size(); ++j) {
      const double d = norm(st[i].p - st[j].p);
      const double sum = st[i].scale + st[j].scale;
      const double arc = st[j].arc - st[i].arc;
      // blocked for r in [d/sum, arc/(window*sum)); only matters if nonempty
      if (d * opt.window < arc && d / sum < cert.r_sup) {
        cert.r_sup = d / sum;
        cert.limited_by = "stations " + std::to_string(i) + "/" + std::to_string(j);
      }
    }
  }
  if (!(cert.r_sup > 0.0)) throw TubeError("choose_radius: no positive radius (" + cert.limited_by + ")");

  // far periods: norms of period 3 must stay below those of period 0
  double max_far = 0.0;
  double min_near = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = std::exp2(-c.node_parameter(i));
    min_near = std::min(min_near, norm(c.samples()[i]) - cert.r_sup * sc);
    max_far = std::max(max_far, norm(c.samples()[i]) / 8.0 + cert.r_sup * sc / 8.0);
  }
  if (!(max_far < min_near)) throw TubeError("choose_radius: lift spans more than three periods in norm");

  cert.r0 = opt.safety * cert.r_sup;
  cert.clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < st.size(); ++j) {
      const double sum = cert.r0 * (st[i].scale + st[j].scale);
      if (st[j].arc - st[i].arc <= opt.window * sum) continue;
      const double gap = norm(st[i].p - st[j].p) - sum;
      cert.clearance = std::min(cert.clearance, gap / norm(st[i].p));
    }
  }
  return cert;
}

enum class TubeStatus { InTube, NotInTube, NoConvergence };

struct TubeInverseResult {
  TubeStatus status = TubeStatus::NotInTube;
  CylinderPoint point{};
  double radial = std::numeric_limits<double>::infinity();  // chart radius of the nearest foot point
};

class TubeChart {
 public:
  TubeChart() = default;

  TubeChart(FramedCurve framed, double r0, double clearance)
      : curve_(std::move(framed.curve)),
        e1_nodes_(std::move(framed.e1)),
        holonomy_(framed.holonomy),
        rotation_(framed.rotation),
        r0_(r0),
        clearance_(clearance) {
    if (!(r0_ > 0.0)) throw TubeError("TubeChart: radius must be positive");
    e1_spline_ = EquivariantSpline(e1_nodes_, 1.0);
    const std::size_t n = curve_.period_samples();
    node_speed_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 next = i + 1 < n ? curve_.samples()[i + 1] : curve_.samples()[0] * 0.5;
      const Vec3 prev = i > 0 ? curve_.samples()[i - 1] : curve_.samples()[n - 1] * 2.0;
      node_speed_[i] = std::max(norm(next - curve_.samples()[i]), norm(curve_.samples()[i] - prev));
    }
  }

  static TubeChart build(const EquivariantCurve& curve, const RadiusOptions& opt = {}) {
    auto framed = build_frame(curve);
    const auto cert = choose_radius(framed, opt);
    return TubeChart(std::move(framed), cert.r0, cert.clearance);
  }

  const EquivariantCurve& curve() const { return curve_; }
  const std::vector<Vec3>& frame_nodes() const { return e1_nodes_; }
  double holonomy() const { return holonomy_; }
  double frame_rotation() const { return rotation_; }
  double r0() const { return r0_; }
  double clearance() const { return clearance_; }
  double radius(double t) const { return r0_ * std::exp2(-t); }

  struct Frame {
    Vec3 tangent, e1, e2;
  };

  Frame frame(double t) const {
    const Vec3 tan = detail::unit_tangent(curve_, t);
    Vec3 e1 = e1_spline_.value(t - curve_.phase());
    e1 = normalized(e1 - dot(e1, tan) * tan);
    return {tan, e1, cross(tan, e1)};
  }

  /// Z without the cylinder check; the glued-map diagnostics evaluate it
  /// slightly outside C.
  Point3 map_unchecked(const CylinderPoint& p) const {
    // reduce to one period; the period shift is an exact power of two
    const double k = std::floor(p.x1 - curve_.phase());
    const double t = p.x1 - k;
    const Frame fr = frame(t);
    const Vec3 local = curve_(t) + (0.5 * radius(t)) * (p.x2 * fr.e1 + p.x3 * fr.e2);
    return local * std::exp2(-k);
  }

  Point3 map(const CylinderPoint& p) const {
    if (radial(p) > kCylinderRadius + 1e-12) throw DomainError("tube_map_Z: point outside the cylinder");
    return map_unchecked(p);
  }

  /// Cylinder coordinates of x, or NotInTube. Candidate parameters come from
  /// log2|x| and a scan of the node stations; each local minimum of the
  /// station distance is refined by a safeguarded Newton iteration on the
  /// foot-point condition (x - lambda(t)) . lambda'(t) = 0.
  TubeInverseResult inverse(const Point3& x) const {
    TubeInverseResult res;
    const double nx = norm(x);
    if (!(nx > 0.0) || !std::isfinite(nx)) return res;
    const auto n = static_cast<long long>(curve_.period_samples());
    const double level = -std::log2(nx);
    // |x| is within a factor [1/2, 3/2] of |lambda(t)| for any tube point
    const double t_lo = level - curve_.log_offset_max() - 0.65;
    const double t_hi = level - curve_.log_offset_min() + 1.05;
    const double dt = 1.0 / static_cast<double>(n);
    const auto g_lo = static_cast<long long>(std::floor((t_lo - curve_.phase()) * n));
    const auto g_hi = static_cast<long long>(std::ceil((t_hi - curve_.phase()) * n));

    std::optional<FootPoint> best;
    bool any_failure = false;
    double d_prev2 = std::numeric_limits<double>::infinity();
    double d_prev = std::numeric_limits<double>::infinity();
    bool prev_candidate = false;
    for (long long g = g_lo - 1; g <= g_hi + 1; ++g) {
      const long long k = g >= 0 ? g / n : -((-g - 1) / n) - 1;
      const auto idx = static_cast<std::size_t>(g - k * n);
      const double scale = std::exp2(-static_cast<double>(k));
      const double d = norm(x - curve_.samples()[idx] * scale);
      const double t = curve_.phase() + static_cast<double>(g) * dt;
      const bool candidate = d <= 1.05 * radius(t) + 2.0 * node_speed_[idx] * scale;
      if (prev_candidate && d_prev <= d_prev2 && d_prev <= d) {
        const double tc = t - dt;
        const auto foot = refine(x, tc - dt, tc + dt, tc);
        if (!foot)
          any_failure = true;
        else if (!best || foot->chart_radius < best->chart_radius)
          best = foot;
      }
      d_prev2 = d_prev;
      d_prev = d;
      prev_candidate = candidate;
    }
    if (!best) {
      res.status = any_failure ? TubeStatus::NoConvergence : TubeStatus::NotInTube;
      return res;
    }
    const double t = best->t;
    const Frame fr = frame(t);
    const Vec3 v = x - curve_(t);
    const double half_r = 0.5 * radius(t);
    res.point = {t, dot(v, fr.e1) / half_r, dot(v, fr.e2) / half_r};
    res.radial = radial(res.point);
    res.status = res.radial <= kCylinderRadius ? TubeStatus::InTube : TubeStatus::NotInTube;
    return res;
  }

 private:
  struct FootPoint {
    double t;
    double chart_radius;
  };

  std::optional<FootPoint> refine(const Point3& x, double a, double b, double t) const {
    auto h = [&](double s) { return dot(x - curve_(s), curve_.tangent(s)); };
    double ha = h(a);
    const bool bracketed = ha * h(b) <= 0.0;
    const double width = b - a;
    const double tol = 1e-15 * std::max(1.0, std::fabs(t));
    for (int it = 0; it < 80; ++it) {
      const Vec3 d1 = curve_.tangent(t);
      const Vec3 diff = x - curve_(t);
      const double ht = dot(diff, d1);
      const double dh = -dot(d1, d1) + dot(diff, curve_.second_derivative(t));
      double next = dh != 0.0 ? t - ht / dh : std::numeric_limits<double>::quiet_NaN();
      if (bracketed) {
        if (ht * ha > 0.0) {
          a = t;
          ha = ht;
        } else {
          b = t;
        }
        if (!(next > a && next < b)) next = 0.5 * (a + b);
      } else if (!std::isfinite(next) || std::fabs(next - t) > 2.0 * width) {
        return std::nullopt;
      }
      const double step = std::fabs(next - t);
      t = next;
      if (step <= tol || (bracketed && b - a <= tol)) {
        const Vec3 v = x - curve_(t);
        const Vec3 tan = detail::unit_tangent(curve_, t);
        return FootPoint{t, 2.0 * norm(v - dot(v, tan) * tan) / radius(t)};
      }
    }
    return std::nullopt;
  }

  EquivariantCurve curve_;
  std::vector<Vec3> e1_nodes_;
  EquivariantSpline e1_spline_;
  std::vector<double> node_speed_;
  double holonomy_ = 0.0;
  double rotation_ = 0.0;
  double r0_ = 0.0;
  double clearance_ = 0.0;
};

/// Chart from an explicit radius, skipping the certificate (fixtures).
inline TubeChart make_chart(const EquivariantCurve& curve, double r0) {
  return TubeChart(build_frame(curve), r0, 0.0);
}

}  // namespace hopfms
