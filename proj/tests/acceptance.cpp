// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hopfms/analysis.hpp"
#include "oracles.hpp"

using namespace hopfms;

namespace {

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Subject {
  std::string name;
  HopfKnotCurve knot;
  RealizedMap map;
  double realize_seconds;
};

Subject make_subject(const std::string& name, HopfKnotCurve k) {
  const auto t0 = std::chrono::steady_clock::now();
  RealizedMap m = realize(k);
  return {name, std::move(k), std::move(m), seconds_since(t0)};
}

Line fixed_point_census(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  for (const auto& s : subjects) {
    const auto t0 = std::chrono::steady_clock::now();
    const SphereMap sm(s.map);
    const auto c = find_fixed_points(sm);
    const double secs = s.realize_seconds + seconds_since(t0);
    bool ok = c.points.size() == 4 && c.indices() == std::vector<int>{0, 1, 2, 3} && secs < 60.0;
    double sink = 1.0, source = 1.0, saddle = 1.0;
    if (c.points.size() == 4) {
      for (const auto& p : c.points) ok = ok && p.hyperbolic();
      sink = scalar_deviation(c.points[0], 0.5);
      source = scalar_deviation(c.points[3], 2.0);
      saddle = std::max(eigen_deviation(c.points[1], saddle_linearization(Saddle::P1)),
                        eigen_deviation(c.points[2], saddle_linearization(Saddle::P2)));
    }
    ok = ok && sink < 1e-9 && source < 1e-9 && saddle < 1e-4;
    pass = pass && ok;
    d += fmt(" %s[n=%zu sink=%.1e source=%.1e saddle=%.1e %.1fs]", s.name.c_str(), c.points.size(), sink, source,
             saddle, secs);
  }
  return {1, pass, d};
}

Line conjugation(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  for (const auto& s : subjects) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ax(-4.0, 4.0);
    std::uniform_real_distribution<double> rad(0.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    const TubeChart& z = s.map.chart();
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double r = rad(rng);
      const double a = ang(rng);
      const Point3 p{ax(rng), r * std::cos(a), r * std::sin(a)};
      worst = std::max(worst, norm(z.map(flow_g(p, 1.0)) - contract_a(z.map(p))));
    }
    const double tol = s.name == "L0" ? 1e-9 : 1e-6;
    pass = pass && worst < tol;
    d += fmt(" %s=%.1e(<%.0e)", s.name.c_str(), worst, tol);
  }
  return {2, pass, d};
}

Line field_integrity() {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  auto on_sphere = [&](double r) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    return normalized(v) * r;
  };
  double seam = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point3 a = on_sphere(2.0);
    seam = std::max(seam, norm(detail::raw_inner(a, 2.0) - detail::raw_middle(a, 2.0)));
    const Point3 b = on_sphere(4.0);
    seam = std::max(seam, norm(detail::raw_middle(b, 4.0) - detail::raw_outer(b)));
  }
  const PhiField f;
  const auto zeros = field_zero_census(f, 0.05, 6.0);
  std::uniform_real_distribution<double> ax(-8.0, 8.0);
  std::uniform_real_distribution<double> rad(f.cutoff_outer(), 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  int off = 0;
  for (int i = 0; i < 10000; ++i) {
    const double r = i == 0 ? f.cutoff_outer() : rad(rng);
    const double a = ang(rng);
    if (!(f.velocity({ax(rng), r * std::cos(a), r * std::sin(a)}) == kTranslation)) ++off;
  }
  const bool pass = seam < 1e-12 && zeros.clusters.size() == 2 && off == 0;
  return {3, pass,
          fmt(" seam=%.1e zeros=%zu translation-violations=%d", seam, zeros.clusters.size(), off)};
}

Line heteroclinic(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  for (const auto& s : subjects) {
    const auto r = verify_heteroclinic(s.map);
    int worst = 0;
    for (const auto& x : r.samples) worst = std::max({worst, x.forward_iterations, x.backward_iterations});
    pass = pass && r.ok && r.samples.size() == 20;
    d += fmt(" %s[invariance=%.1e iterations<=%d]", s.name.c_str(), r.max_invariance, worst);
  }
  return {4, pass, d};
}

Line invariant_knots(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  for (const auto& s : subjects) {
    const auto p = extract_invariant_knot(s.map, 1, &s.knot);
    const auto q = extract_invariant_knot(s.map, -1, &s.knot);
    const double r0 = s.map.chart().r0();
    bool ok = p.closed && q.closed;
    double mutual = std::numeric_limits<double>::infinity();
    if (ok) {
      mutual = hausdorff_distance(p.knot, q.knot);
      ok = p.closure_residual < 1e-6 && q.closure_residual < 1e-6 && p.degree == 1 && q.degree == 1 &&
           mutual < 2.0 * r0 && p.hausdorff_to_reference < r0 + 1e-2 && q.hausdorff_to_reference < r0 + 1e-2;
    }
    pass = pass && ok;
    d += fmt(" %s[mutual=%.2fr0 source=%.2f/%.2fr0 degree=%d/%d]", s.name.c_str(), mutual / r0,
             p.hausdorff_to_reference / r0, q.hausdorff_to_reference / r0, p.degree, q.degree);
  }
  return {5, pass, d};
}

Line basin(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  for (const auto& s : subjects) {
    const auto r = basin_invariance(s.map, 1000, 13, {}, 1e-6);
    pass = pass && r.pass;
    d += fmt(" %s=%.1e", s.name.c_str(), r.value);
  }
  return {6, pass, d};
}

Line degree_oracle(const std::vector<Subject>& subjects) {
  int agree = 0;
  int total = 0;
  for (const auto& s : subjects) {
    ++total;
    agree += s1_degree(s.knot) == oracle::winding(s.knot);
  }
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> deg(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const int w = deg(rng);
    const auto k = oracle::random_loop(rng, w);
    ++total;
    agree += s1_degree(k) == w && oracle::winding(k) == w;
  }
  return {7, agree == total, fmt(" %d/%d agree", agree, total)};
}

Line negative_control(const std::vector<Subject>& subjects) {
  bool pass = true;
  std::string d;
  RealizeOptions raw;
  raw.flow.raw = true;
  for (const auto& s : subjects) {
    const double smooth = glued_continuity(s.map).max_discrepancy;
    const double bad = glued_continuity(realize(s.knot, {}, raw)).max_discrepancy;
    pass = pass && bad > 0.1 && smooth < 1e-7;
    d += fmt(" %s[raw=%.3g smoothed=%.1e]", s.name.c_str(), bad, smooth);
  }
  return {8, pass, d};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Subject> subjects;
  subjects.push_back(make_subject("L0", standard_hopf({0, 0, 1}, 800)));
  subjects.push_back(make_subject("LM", mazur_knot(800)));
  subjects.push_back(make_subject("LM_n1", generalized_mazur(1, 800)));
  subjects.push_back(make_subject("LM_n2", generalized_mazur(2, 800)));
  const std::vector<Subject> census_set(subjects.begin(), subjects.end());
  subjects.push_back(make_subject("LM_k1", generalized_mazur_k(1, 800)));

  const char* names[] = {"",
                         "fixed-point census",
                         "conjugation identity",
                         "field integrity",
                         "heteroclinic certification",
                         "invariant-knot extraction",
                         "orbit-space projection invariance",
                         "degree oracle equivalence",
                         "negative control"};
  std::vector<Line> lines;
  auto run = [&](auto&& f) {
    try {
      lines.push_back(f());
    } catch (const std::exception& e) {
      lines.push_back({static_cast<int>(lines.size()) + 1, false, std::string(" error: ") + e.what()});
    }
    const auto& l = lines.back();
    std::printf("%s criterion %d %s:%s\n", l.pass ? "PASS" : "FAIL", l.id, names[l.id], l.detail.c_str());
    std::fflush(stdout);
  };
  run([&] { return fixed_point_census(census_set); });
  run([&] { return conjugation(subjects); });
  run([&] { return field_integrity(); });
  run([&] { return heteroclinic(subjects); });
  run([&] { return invariant_knots(subjects); });
  run([&] { return basin(subjects); });
  run([&] { return degree_oracle(subjects); });
  run([&] { return negative_control(subjects); });
  const bool all = std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
  std::printf("%s: %zu criteria in %.1fs\n", all ? "ALL PASS" : "SOME FAILED", lines.size(), seconds_since(t0));
  return all ? 0 : 1;
}
