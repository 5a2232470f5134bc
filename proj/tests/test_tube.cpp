#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfms/tube.hpp"

using namespace hopfms;

namespace {

TubeChart catalog_chart(const HopfKnotCurve& k) {
  auto f = build_frame(lift_to_r3(k));
  orient_frame(f);
  const auto cert = choose_radius(f);
  return TubeChart(std::move(f), cert.r0, cert.clearance);
}

const TubeChart& mazur_chart() {
  static const TubeChart c = catalog_chart(mazur_knot(800));
  return c;
}

/// Degree-one loop with a switchback in the circle coordinate; the three
/// strands at equal levels sit about `gap` apart on S^2.
HopfKnotCurve switchback(double gap, std::size_t n = 800) {
  HopfKnotCurve k{"switchback", {}, 1};
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i % n) / static_cast<double>(n);
    const double a = 2.0 * std::numbers::pi * t;
    const double s = t + 0.3 * std::sin(a);
    k.samples.push_back({normalized(Vec3{gap * std::sin(a), 0.3 * (1.0 - std::cos(a)), 1.0}), wrap_unit(s)});
  }
  return k;
}

}  // namespace

TEST_CASE("chart of the standard knot in closed form", "[tube]") {
  const auto z = make_chart(lift_to_r3(standard_hopf({0, 0, 1}, 100)), 0.5);
  CHECK(norm(z.map({0, 0, 0}) - Vec3{0, 0, 1}) < 1e-14);
  CHECK(norm(z.map({1, 0, 0}) - Vec3{0, 0, 0.5}) < 1e-14);
  CHECK(norm(z.map({1, 2, 0}) - Vec3{0.25, 0, 0.5}) < 1e-14);
  CHECK(std::fabs(z.holonomy()) < 1e-12);
  for (double t : {0.0, 0.3, 0.77}) CHECK(norm(z.frame(t).e1 - z.frame(0.0).e1) < 1e-12);
}

TEST_CASE("tube inverse", "[tube]") {
  const auto z = make_chart(lift_to_r3(standard_hopf({0, 0, 1}, 100)), 0.5);
  const auto r = z.inverse(z.map({0.3, 1.0, -0.5}));
  REQUIRE(r.status == TubeStatus::InTube);
  CHECK(norm(r.point - Vec3{0.3, 1.0, -0.5}) < 1e-9);
  for (const TubeChart* c : {&z, &mazur_chart()}) {
    // physical distance 2 r(t) from the curve is chart radius 4
    const double t = 0.4;
    const auto f = c->frame(t);
    const Point3 far = c->curve()(t) + 2.0 * c->radius(t) * f.e1;
    CHECK(c->inverse(far).status == TubeStatus::NotInTube);
    // deep down the tube, next to the origin
    const Vec3 p{30.3, 1.0, -0.5};
    const auto d = c->inverse(c->map(p));
    REQUIRE(d.status == TubeStatus::InTube);
    CHECK(norm(d.point - p) < 1e-9 * 30.3);
  }
}

TEST_CASE("frame invariants on the catalog", "[tube]") {
  for (const auto& k : {mazur_knot(800), generalized_mazur(1, 800), generalized_mazur(2, 800),
                        generalized_mazur_k(1, 800)}) {
    INFO(k.name);
    const auto lam = lift_to_r3(k);
    const auto f = build_frame(lam);
    const std::size_t n = lam.period_samples();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 tan = normalized(lam.tangent(lam.node_parameter(i)));
      const Vec3 e1 = f.e1[i];
      const Vec3 e2 = cross(tan, e1);
      CHECK(std::fabs(dot(e1, e1) - 1.0) < 1e-10);
      CHECK(std::fabs(dot(e1, tan)) < 1e-10);
      CHECK(std::fabs(dot(e1, e2)) < 1e-10);
    }
    const TubeChart z(f, 0.01, 0.0);
    double closure = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double t = lam.phase() + i / 200.0;
      closure = std::max(closure, norm(z.frame(t + 1.0).e1 - z.frame(t).e1));
    }
    CHECK(closure < 1e-9);
    // two transported periods close with twice the angle
    const double twice = transport_holonomy(lam, 2);
    const double expected = std::remainder(2.0 * f.holonomy, 2.0 * std::numbers::pi);
    CHECK(std::fabs(std::remainder(twice - expected, 2.0 * std::numbers::pi)) < 1e-9);
  }
}

TEST_CASE("radius certificate", "[tube]") {
  const auto l0 = build_frame(lift_to_r3(standard_hopf({0, 0, 1}, 100)));
  const auto c0 = choose_radius(l0);
  CHECK(c0.r0 == Catch::Approx(0.4));
  CHECK(c0.clearance > 0.5);
  const auto& m = mazur_chart();
  CHECK(m.r0() > 0.0);
  CHECK(m.r0() < 0.4);
  CHECK(m.clearance() > 0.0);
}

TEST_CASE("radius shrinks with the clearance of a near-touching curve", "[tube]") {
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> radii;
  for (double gap : {0.2, 0.1, 0.05}) {
    const auto k = switchback(gap);
    REQUIRE(s1_degree(k) == 1);
    REQUIRE(validate_embedding(k).ok);
    const auto cert = choose_radius(build_frame(lift_to_r3(k)));
    CHECK(cert.r0 > 0.0);
    CHECK(cert.r0 < previous);
    previous = cert.r0;
    radii.push_back(cert.r0);
  }
  CHECK(radii.back() < 0.5 * radii.front());
}

TEST_CASE("orienting the frame lowers the radial exposure and keeps the radius", "[tube]") {
  auto f = build_frame(lift_to_r3(generalized_mazur(2, 800)));
  const double before = radial_exposure(f, 0.0);
  const double r_before = choose_radius(f).r0;
  const double after = orient_frame(f);
  CHECK(after <= before);
  CHECK(after < 1.1);
  CHECK(std::fabs(radial_exposure(f, 0.0) - after) < 1e-12);
  CHECK(std::fabs(choose_radius(f).r0 - r_before) < 1e-12 * r_before);
}

TEST_CASE("chart conjugates translation with the contraction", "[tube][property]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ax(-3.0, 3.0);
  std::uniform_real_distribution<double> rad(0.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const auto l0 = make_chart(lift_to_r3(standard_hopf({0, 0, 1}, 100)), 0.4);
  double e0 = 0.0;
  double em = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double r = rad(rng);
    const double a = ang(rng);
    const Point3 p{ax(rng), r * std::cos(a), r * std::sin(a)};
    const Point3 q = p + Vec3{1, 0, 0};
    e0 = std::max(e0, norm(l0.map(q) - contract_a(l0.map(p))));
    em = std::max(em, norm(mazur_chart().map(q) - contract_a(mazur_chart().map(p))));
  }
  CHECK(e0 < 1e-9);
  CHECK(em < 1e-9);
}

TEST_CASE("chart is injective and its image avoids the origin", "[tube][property]") {
  const auto& z = mazur_chart();
  const auto& lam = z.curve();
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 8000; ++i) {
    const double t = lam.phase() + i / 8000.0;
    m = std::min(m, norm(lam(t)) * std::exp2(t));
  }
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ax(-4.0, 4.0);
  std::uniform_real_distribution<double> rad(0.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  auto draw = [&] {
    const double r = rad(rng);
    const double a = ang(rng);
    return Point3{ax(rng), r * std::cos(a), r * std::sin(a)};
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point3 p = draw();
    const Point3 x = z.map(p);
    CHECK(norm(x) >= std::exp2(-p.x1) * (m - z.r0()) * (1.0 - 1e-9));
    const auto r = z.inverse(x);
    REQUIRE(r.status == TubeStatus::InTube);
    worst = std::max(worst, norm(r.point - p));
  }
  CHECK(worst < 1e-9);
  int collisions = 0;
  for (int i = 0; i < 100000; ++i) {
    const Point3 p = draw();
    const Point3 q = draw();
    if (norm(p - q) < 1e-3) continue;
    if (norm(z.map(p) - z.map(q)) == 0.0) ++collisions;
  }
  CHECK(collisions == 0);
}
