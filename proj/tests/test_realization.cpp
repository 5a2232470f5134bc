#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfms/analysis.hpp"
#include "hopfms/realization.hpp"

using namespace hopfms;

namespace {

const RealizedMap& standard_map() {
  static const RealizedMap m = realize(standard_hopf({0, 0, 1}, 100));
  return m;
}

const RealizedMap& mazur_map() {
  static const RealizedMap m = realize(mazur_knot(800));
  return m;
}

Point3 chart_sample(std::mt19937_64& rng, double x1_lo, double x1_hi, double rho_lo, double rho_hi) {
  std::uniform_real_distribution<double> ax(x1_lo, x1_hi);
  std::uniform_real_distribution<double> rad(rho_lo, rho_hi);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const double r = rad(rng);
  const double a = ang(rng);
  return {ax(rng), r * std::cos(a), r * std::sin(a)};
}

}  // namespace

TEST_CASE("realization pipeline", "[realization]") {
  const auto& l0 = standard_map();
  CHECK(std::fabs(l0.chart().holonomy()) < 1e-12);
  CHECK(l0.chart().frame_rotation() == 0.0);
  CHECK(l0.chart().r0() == Catch::Approx(0.4));
  const auto& lm = mazur_map();
  CHECK(lm.chart().r0() > 0.0);
  CHECK(std::isfinite(lm.chart().r0()));
  const auto rep = lm.report();
  CHECK(rep.axial_lo < -4.0);
  CHECK(rep.axial_hi > 4.0);
  CHECK(rep.norm_lo < rep.norm_hi);
  CHECK(rep.safe_ball_radius < rep.norm_lo);
  CHECK(rep.source_degree == 1);
}

TEST_CASE("realization rejects curves that are not Hopf knots", "[realization]") {
  HopfKnotCurve flat{"flat", {}, 1};
  for (int i = 0; i <= 64; ++i) {
    const double a = 2.0 * std::numbers::pi * (i % 64) / 64.0;
    flat.samples.push_back({normalized(Vec3{std::cos(a), std::sin(a), 1.0}), 0.25});
  }
  try {
    (void)realize(flat);
    FAIL("expected a RealizationError");
  } catch (const RealizationError& e) {
    CHECK(e.stage() == "validate");
  }
  CHECK_THROWS_AS(realize(mazur_knot(16)), RealizationError);
}

TEST_CASE("the map is the contraction away from the tube", "[realization]") {
  for (const RealizedMap* m : {&standard_map(), &mazur_map()}) {
    CHECK(m->eval_forward({100, -50, 3}) == Point3{50, -25, 1.5});
    CHECK(m->eval_forward({0, 0, 0}) == Point3{0, 0, 0});
    CHECK(m->eval_forward({1e-5, 0, 0}) == Point3{5e-6, 0, 0});
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    int checked = 0;
    while (checked < 10000) {
      const Point3 x{u(rng), u(rng), u(rng)};
      const auto e = m->evaluate(x);
      if (e.branch == RealizedMap::Branch::TubeFlow) continue;
      CHECK(e.value == x * 0.5);
      ++checked;
    }
    // just outside the tube boundary and inside its pure-translation part
    for (int i = 0; i < 1000; ++i) {
      const Point3 out = m->chart().map_unchecked(chart_sample(rng, -4.0, 4.0, 2.05, 2.3));
      CHECK(m->eval_forward(out) == out * 0.5);
      const Point3 in = m->chart().map(chart_sample(rng, -4.0, 4.0, 1.8, 2.0));
      CHECK(norm(m->eval_forward(in) - in * 0.5) < 1e-9 * norm(in));
    }
  }
}

TEST_CASE("saddles are fixed", "[realization]") {
  for (const RealizedMap* m : {&standard_map(), &mazur_map()}) {
    for (Saddle s : {Saddle::P1, Saddle::P2}) {
      const Point3 x = m->saddle(s);
      CHECK(norm(m->eval_forward(x) - x) < 1e-9);
      CHECK(norm(m->eval_inverse(x) - x) < 1e-9);
    }
  }
}

TEST_CASE("forward and inverse evaluation invert each other", "[realization][property]") {
  for (const RealizedMap* m : {&standard_map(), &mazur_map()}) {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      Point3 x;
      if (i % 2 == 0) {
        x = m->chart().map(chart_sample(rng, -5.5, 5.5, 0.0, 2.0));
      } else {
        const double s = std::exp2(6.0 * u(rng));
        x = Point3{u(rng), u(rng), u(rng)} * s;
      }
      const Point3 y = m->eval_inverse(m->eval_forward(x));
      worst = std::max(worst, norm(y - x) / std::max(norm(x), 1e-300));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("sphere map", "[realization]") {
  const SphereMap sm(mazur_map());
  CHECK(sm.eval(kNorthPole) == kNorthPole);
  CHECK(sphere_eval(sm, kSouthPole) == kSouthPole);
  // both charts agree on the shell |x| = 1
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Point3 x = normalized(Vec3{g(rng), g(rng), g(rng)}) * (1.0 + 0.2 * (i % 5 - 2) / 2.0);
    const SpherePoint4 a = stereographic(sm.eval_standard(x));
    const SpherePoint4 b = inverted_chart_inv(sm.eval_inverted(inversion(x)));
    worst = std::max(worst, distance(a, b));
  }
  CHECK(worst < 1e-9);
  // source at N: the inverted-chart differential is 2 I
  const Mat3 j = finite_difference_jacobian([&](const Point3& w) { return sm.eval_inverted(w); }, {0, 0, 0}, 1e-9);
  CHECK(max_abs(j - Mat3::identity(2.0)) < 1e-9);
}
