#pragma once

// The glued map: f = a outside the tube, Z phi Z^{-1} inside, and its
// transfer to S^3 by stereographic projection.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "hopfms/geometry.hpp"
#include "hopfms/knots.hpp"
#include "hopfms/model.hpp"
#include "hopfms/tube.hpp"

namespace hopfms {

class RealizationError : public std::runtime_error {
 public:
  RealizationError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// A tube point whose foot-point iteration failed; never silently mapped by a.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RealizeOptions {
  RadiusOptions radius{};
  FlowOptions flow{};
  double margin = 0.05;  // extra chart length around the region where phi differs from g
  bool orient = true;    // rotate the frame to keep e2 lateral (see orient_frame)
};

struct RealizationReport {
  std::string knot;
  std::size_t resolution = 0;
  int source_degree = 1;
  RadiusCertificate radius;
  double holonomy = 0.0;
  double frame_rotation = 0.0;
  double cutoff_inner = 0.0;
  double cutoff_outer = 0.0;
  bool raw_field = false;
  double step = 0.0;
  double axial_lo = 0.0;  // chart x1 range of the modification region (either direction)
  double axial_hi = 0.0;
  double norm_lo = 0.0;   // norm bounds of its image
  double norm_hi = 0.0;
  int k0 = 0;
  double safe_ball_radius = 0.0;
};

class RealizedMap {
 public:
  enum class Branch { Origin, Contraction, TubeTranslation, TubeFlow };

  struct Evaluation {
    Point3 value;
    Branch branch = Branch::Contraction;
    CylinderPoint chart_point{};
  };

  RealizedMap(TubeChart chart, PhiField field, std::string name, RealizeOptions opt = {}, int source_degree = 1,
              RadiusCertificate cert = {})
      : chart_(std::move(chart)),
        field_(field),
        name_(std::move(name)),
        opt_(opt),
        source_degree_(source_degree),
        cert_(std::move(cert)) {
    if (cert_.r0 == 0.0) {
      cert_.r0 = chart_.r0();
      cert_.clearance = chart_.clearance();
    }
    // phi differs from g only for x1 in [-4, 4]; one more period either way
    // covers both the forward and the inverse time-1 maps.
    axial_hi_ = kBallRadius + 1.0 + opt_.margin;
    // |lambda(t)| 2^t over a dense sampling of one period
    const EquivariantCurve& c = chart_.curve();
    const std::size_t n = c.period_samples();
    double m = std::numeric_limits<double>::infinity();
    double big = 0.0;
    for (std::size_t i = 0; i < 8 * n; ++i) {
      const double t = c.phase() + static_cast<double>(i) / static_cast<double>(8 * n);
      const double v = norm(c(t)) * std::exp2(t);
      m = std::min(m, v);
      big = std::max(big, v);
    }
    const double r0 = chart_.r0();
    if (!(m > r0)) throw RealizationError("realize", "tube reaches the origin");
    norm_lo_ = std::exp2(-axial_hi_) * (m - r0) * (1.0 - 1e-3);
    norm_hi_ = std::exp2(axial_hi_) * (big + r0) * (1.0 + 1e-3);
    k0_ = static_cast<int>(std::ceil(-std::log2(norm_lo_)));
    inner_ = std::exp2(-k0_);
  }

  /// lift -> frame -> radius -> chart.
  static RealizedMap realize(const HopfKnotCurve& knot, const PhiField& field = {}, const RealizeOptions& opt = {}) {
    int deg = 0;
    try {
      deg = s1_degree(knot);
    } catch (const std::exception& e) {
      throw RealizationError("validate", e.what());
    }
    if (deg != 1 && deg != -1)
      throw RealizationError("validate", "S1-degree is " + std::to_string(deg) + ", a Hopf knot needs +-1");
    const auto emb = validate_embedding(knot);
    if (!emb.ok)
      throw RealizationError("validate", "not embedded: segments " + std::to_string(emb.segment_a) + " and " +
                                             std::to_string(emb.segment_b) + " are " +
                                             std::to_string(emb.min_clearance) + " apart");
    EquivariantCurve curve;
    try {
      curve = lift_to_r3(knot);
    } catch (const std::exception& e) {
      throw RealizationError("lift", e.what());
    }
    FramedCurve framed;
    try {
      framed = build_frame(curve);
      if (opt.orient) orient_frame(framed);
    } catch (const std::exception& e) {
      throw RealizationError("frame", e.what());
    }
    RadiusCertificate cert;
    try {
      cert = choose_radius(framed, opt.radius);
    } catch (const std::exception& e) {
      throw RealizationError("radius", e.what());
    }
    TubeChart chart(std::move(framed), cert.r0, cert.clearance);
    return RealizedMap(std::move(chart), field, knot.name, opt, deg, cert);
  }

  const TubeChart& chart() const { return chart_; }
  const PhiField& field() const { return field_; }
  const std::string& name() const { return name_; }
  const RealizeOptions& options() const { return opt_; }
  int source_degree() const { return source_degree_; }
  bool raw_field() const { return opt_.flow.raw; }

  /// Below this norm f = a (the short-circuit radius 2^{-k0}).
  double inner_radius() const { return inner_; }
  /// Above this norm f = a.
  double outer_radius() const { return norm_hi_; }
  /// a-invariant ball disjoint from the modification region.
  double safe_ball_radius() const { return 0.5 * inner_; }

  /// Saddles of the realized map: the images of P1 and P2.
  Point3 saddle(Saddle s) const { return chart_.map(saddle_point(s)); }

  Evaluation evaluate(const Point3& x, bool inverse = false) const {
    const double s = inverse ? 2.0 : 0.5;
    const double n = norm(x);
    if (n == 0.0) return {x, Branch::Origin, {}};
    if (n < inner_ || n > norm_hi_ || !std::isfinite(n)) return {x * s, Branch::Contraction, {}};
    const auto inv = chart_.inverse(x);
    if (inv.status == TubeStatus::NoConvergence)
      throw EvaluationError("eval: tube foot-point iteration failed near |x| = " + std::to_string(n));
    if (inv.status == TubeStatus::NotInTube) return {x * s, Branch::Contraction, {}};
    const double t = inverse ? -1.0 : 1.0;
    if (field_.translation_only(inv.point, t, opt_.flow.raw)) return {x * s, Branch::TubeTranslation, inv.point};
    const CylinderPoint q = flow_phi(field_, inv.point, t, opt_.flow);
    return {chart_.map_unchecked(q), Branch::TubeFlow, inv.point};
  }

  Point3 eval_forward(const Point3& x) const { return evaluate(x, false).value; }
  Point3 eval_inverse(const Point3& x) const { return evaluate(x, true).value; }

  /// True when x lies in the part of the tube where f differs from a.
  bool in_modification_region(const Point3& x) const { return evaluate(x).branch == Branch::TubeFlow; }

  RealizationReport report() const {
    RealizationReport r;
    r.knot = name_;
    r.resolution = chart_.curve().period_samples();
    r.source_degree = source_degree_;
    r.radius = cert_;
    r.holonomy = chart_.holonomy();
    r.frame_rotation = chart_.frame_rotation();
    r.cutoff_inner = field_.cutoff_inner();
    r.cutoff_outer = field_.cutoff_outer();
    r.raw_field = opt_.flow.raw;
    r.step = opt_.flow.step;
    r.axial_lo = -axial_hi_;
    r.axial_hi = axial_hi_;
    r.norm_lo = norm_lo_;
    r.norm_hi = norm_hi_;
    r.k0 = k0_;
    r.safe_ball_radius = safe_ball_radius();
    return r;
  }

 private:
  TubeChart chart_;
  PhiField field_;
  std::string name_;
  RealizeOptions opt_;
  int source_degree_ = 1;
  RadiusCertificate cert_;
  double axial_hi_ = 0.0;
  double norm_lo_ = 0.0;
  double norm_hi_ = 0.0;
  int k0_ = 0;
  double inner_ = 0.0;
};

inline RealizedMap realize(const HopfKnotCurve& knot, const PhiField& field = {}, const RealizeOptions& opt = {}) {
  return RealizedMap::realize(knot, field, opt);
}

/// The realized map transferred to S^3. Points with |x| > 1 are handled in
/// the inverted chart w = x/|x|^2, where f far out is w -> 2w.
class SphereMap {
 public:
  explicit SphereMap(RealizedMap m) : m_(std::move(m)) {}

  const RealizedMap& realized() const { return m_; }

  Point3 eval_standard(const Point3& x, bool inverse = false) const {
    return inverse ? m_.eval_inverse(x) : m_.eval_forward(x);
  }

  Point3 eval_inverted(const Point3& w, bool inverse = false) const {
    const double n = norm(w);
    if (n == 0.0) return w;
    if (n * m_.outer_radius() < 1.0) return inverse ? w * 0.5 : w * 2.0;
    return inversion(eval_standard(inversion(w), inverse));
  }

  SpherePoint4 eval(const SpherePoint4& y, bool inverse = false) const {
    if (y.y[3] > 0.0) {
      if (1.0 - y.y[3] == 0.0) return kNorthPole;
      return inverted_chart_inv(eval_inverted(inverted_chart(y), inverse));
    }
    return stereographic(eval_standard(stereographic_inv(y), inverse));
  }

 private:
  RealizedMap m_;
};

inline SphereMap to_sphere_map(RealizedMap m) { return SphereMap(std::move(m)); }

inline SpherePoint4 sphere_eval(const SphereMap& sm, const SpherePoint4& y) { return sm.eval(y); }

}  // namespace hopfms
