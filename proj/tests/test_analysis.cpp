#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfms/analysis.hpp"

using namespace hopfms;

namespace {

const HopfKnotCurve& standard_knot() {
  static const HopfKnotCurve k = standard_hopf({0, 0, 1}, 100);
  return k;
}

const RealizedMap& standard_map() {
  static const RealizedMap m = realize(standard_knot());
  return m;
}

const HopfKnotCurve& mazur() {
  static const HopfKnotCurve k = mazur_knot(800);
  return k;
}

const RealizedMap& mazur_map() {
  static const RealizedMap m = realize(mazur());
  return m;
}

}  // namespace

TEST_CASE("eigenvalues of 3x3 matrices", "[analysis]") {
  const auto d = eigenvalues(Mat3::diagonal(2.0, -0.5, 0.25));
  CHECK(std::abs(d[0] - 0.25) < 1e-15);
  CHECK(std::abs(d[1] + 0.5) < 1e-15);
  CHECK(std::abs(d[2] - 2.0) < 1e-15);
  // rotation by 90 degrees about x3 scaled by 3: eigenvalues 3i, -3i, 1
  Mat3 r;
  r(0, 1) = -3.0;
  r(1, 0) = 3.0;
  r(2, 2) = 1.0;
  const auto c = eigenvalues(r);
  CHECK(std::abs(c[0] - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(c[1]) - 3.0) < 1e-14);
  CHECK(std::fabs(c[1].real()) < 1e-14);
  // similarity preserves the spectrum
  const Mat3 p = Mat3::from_columns({1, 2, 0}, {0, 1, 1}, {1, 0, 3});
  Mat3 pinv;
  for (int k = 0; k < 3; ++k) {
    Vec3 e{};
    e[k] = 1.0;
    const Vec3 col = solve(p, e);
    for (int i = 0; i < 3; ++i) pinv(i, k) = col[i];
  }
  const auto s = eigenvalues(p * Mat3::diagonal(0.5, std::exp(-2.0 / 3.0), std::exp(1.0)) * pinv);
  CHECK(std::abs(s[0] - 0.5) < 1e-12);
  CHECK(std::abs(s[1] - std::exp(-2.0 / 3.0)) < 1e-12);
  CHECK(std::abs(s[2] - std::exp(1.0)) < 1e-12);
  const Vec3 v = eigenvector(p * Mat3::diagonal(0.5, 0.8, 3.0) * pinv, 3.0);
  CHECK(norm(cross(v, normalized(p.column(2)))) < 1e-12);
}

TEST_CASE("fixed points of the standard realization", "[analysis]") {
  const SphereMap sm(standard_map());
  const auto c = find_fixed_points(sm);
  REQUIRE(c.ok());
  REQUIRE(c.points.size() == 4);
  const auto& p = c.points;
  CHECK(p[0].kind == FixedPointKind::Sink);
  CHECK(norm(p[0].location) == 0.0);
  CHECK(max_abs(p[0].jacobian - Mat3::identity(0.5)) < 1e-9);
  CHECK(p[3].kind == FixedPointKind::Source);
  CHECK(p[3].chart == ChartTag::Inverted);
  CHECK(max_abs(p[3].jacobian - Mat3::identity(2.0)) < 1e-9);
  CHECK(norm(p[1].location - standard_map().saddle(Saddle::P1)) < 1e-9);
  CHECK(norm(p[2].location - standard_map().saddle(Saddle::P2)) < 1e-9);
  CHECK(eigen_deviation(p[1], saddle_linearization(Saddle::P1)) < 1e-4);
  CHECK(eigen_deviation(p[2], saddle_linearization(Saddle::P2)) < 1e-4);
  for (const auto& r : p) CHECK(r.spectral_gap() >= 0.25);
}

TEST_CASE("basin projection", "[analysis]") {
  const auto& m = mazur_map();
  const Point3 inside{0.3 * m.safe_ball_radius(), 0.1 * m.safe_ball_radius(), 0.0};
  const auto a = basin_projection(m, inside);
  CHECK(a.status == BasinStatus::InBasin);
  CHECK(a.iterations == 0);
  CHECK(a.point == project_p(inside));
  CHECK(basin_projection(m, {0, 0, 0}).status == BasinStatus::Origin);
  // points on the heteroclinic curve limit to the index-1 saddle
  for (double x1 : {-0.5, 0.0, 0.5}) {
    const auto h = basin_projection(m, m.chart().map({x1, 0, 0}));
    CHECK(h.status == BasinStatus::NotInBasin);
    CHECK_FALSE(h.reason.empty());
  }
  const auto inv = basin_invariance(m, 300, 5, {}, 1e-6);
  CHECK(inv.pass);
}

TEST_CASE("separatrices of the index-1 saddle", "[analysis]") {
  const auto& m = standard_map();
  for (int b : {1, -1}) {
    const auto tr = trace_separatrix(m, b);
    REQUIRE(tr.converged);
    CHECK(tr.branch == b);
    CHECK(tr.max_chart_radius < 2.0);
    CHECK(tr.markers.size() + 1 == tr.iterates.size());
    // the tail contracts by a half per iterate
    const std::size_t n = tr.iterates.size();
    CHECK(std::fabs(norm(tr.iterates[n - 1]) / norm(tr.iterates[n - 2]) - 0.5) < 1e-6);
    CHECK(norm(tr.polyline.back()) < m.safe_ball_radius());
  }
}

TEST_CASE("invariant knots of the standard realization", "[analysis]") {
  const auto& m = standard_map();
  const double r0 = m.chart().r0();
  const auto p = extract_invariant_knot(m, 1, &standard_knot());
  const auto q = extract_invariant_knot(m, -1, &standard_knot());
  for (const auto* k : {&p, &q}) {
    REQUIRE(k->closed);
    CHECK(k->closure_residual < 1e-6);
    CHECK(k->degree == 1);
    CHECK(k->hausdorff_to_reference < r0);
    CHECK(k->richardson < 1e-4);
  }
  CHECK(hausdorff_distance(p.knot, q.knot) < 2.0 * r0);
}

TEST_CASE("invariant knot of the Mazur realization", "[analysis]") {
  const auto& m = mazur_map();
  const auto r = extract_invariant_knot(m, 1, &mazur());
  REQUIRE(r.closed);
  CHECK(r.degree == 1);
  CHECK(r.hausdorff_to_reference < m.chart().r0());
}

TEST_CASE("projected unstable surface of the index-2 saddle", "[analysis]") {
  const auto& m = standard_map();
  SurfaceOptions opt;
  opt.loops = 8;
  const auto s = project_unstable_surface(m, opt);
  REQUIRE(s.loops.size() == 8);
  int in_basin = 0;
  for (const auto& l : s.loops) {
    const bool heteroclinic = std::fabs(l.angle - std::numbers::pi) < 1e-9;
    if (heteroclinic) {
      CHECK(l.status == BasinStatus::NotInBasin);
      continue;
    }
    REQUIRE(l.status == BasinStatus::InBasin);
    CHECK(l.degree == 1);
    ++in_basin;
  }
  CHECK(in_basin == 7);
  // every point stays within r0 of the knot the tube surrounds
  for (const auto& p : s.cloud) CHECK(angle_between(p.u, {0, 0, 1}) < m.chart().r0());
}

TEST_CASE("heteroclinic curve", "[analysis]") {
  const auto& m = mazur_map();
  const auto rep = verify_heteroclinic(m);
  CHECK(rep.ok);
  CHECK(rep.samples.size() == 20);
  CHECK(rep.max_invariance < 1e-7);
  CHECK(rep.axis_velocity < 0.0);
  HeteroclinicOptions one;
  one.samples = 1;
  const auto mid = verify_heteroclinic(m, one);
  REQUIRE(mid.samples.size() == 1);
  CHECK(mid.samples[0].x1 == 0.0);
  CHECK(mid.samples[0].forward_iterations > 0);
  CHECK(mid.samples[0].backward_iterations > 0);
}

TEST_CASE("gluing across the tube boundary", "[analysis]") {
  CHECK(glued_continuity(standard_map(), 300).max_discrepancy < 1e-7);
  RealizeOptions raw;
  raw.flow.raw = true;
  const auto m = realize(standard_knot(), {}, raw);
  CHECK(glued_continuity(m, 300).max_discrepancy > 0.1);
}

TEST_CASE("census of the standard realization", "[analysis]") {
  const SphereMap sm(standard_map());
  CensusOptions opt;
  opt.basin_samples = 200;
  const auto s = census(sm, &standard_knot(), opt);
  for (const auto& c : s.criteria) {
    INFO(c.name << ": " << c.value << " vs " << c.tolerance);
    CHECK(c.pass);
  }
  CHECK(s.ok());
  CHECK(s.fixed_points.indices() == std::vector<int>{0, 1, 2, 3});
}
