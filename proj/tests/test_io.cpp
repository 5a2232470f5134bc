#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <regex>

#include "hopfms/io.hpp"

using namespace hopfms;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "hopfms_test_io";
  fs::create_directories(d);
  return d / name;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("knot files round trip bit for bit", "[io]") {
  const auto k = mazur_knot(400);
  const fs::path p = scratch("lm.json");
  save_knot(p, k, {{"source", "catalog"}});
  const auto back = load_knot(p);
  REQUIRE(back.samples.size() == k.samples.size());
  for (std::size_t i = 0; i < k.samples.size(); ++i) {
    CHECK(back.samples[i].u == k.samples[i].u);
    CHECK(back.samples[i].c == k.samples[i].c);
  }
  CHECK(back.name == k.name);
  CHECK(s1_degree(back) == s1_degree(k));
  const fs::path q = scratch("lm2.json");
  save_knot(q, back, {{"source", "catalog"}});
  CHECK(read_file(p) == read_file(q));
  CHECK_FALSE(fs::exists(fs::path(p) += ".tmp"));
}

TEST_CASE("malformed knot files are rejected", "[io]") {
  Json j = knot_to_json(standard_hopf({0, 0, 1}, 16));
  Json bad_space = j;
  bad_space["space"] = "R3";
  CHECK_THROWS_AS(knot_from_json(bad_space), FormatError);
  Json off_sphere = j;
  off_sphere["samples"][3][0] = 0.5;
  CHECK_THROWS_AS(knot_from_json(off_sphere), FormatError);
  Json open = j;
  open["samples"].back()[3] = 0.5;
  CHECK_THROWS_AS(knot_from_json(open), FormatError);
  Json short_row = j;
  short_row["samples"][1] = Json::array({0.0, 0.0, 1.0});
  CHECK_THROWS_AS(knot_from_json(short_row), FormatError);
  CHECK_THROWS_AS(parse_json("{", "x"), FormatError);
  CHECK_THROWS_AS(load_knot(scratch("missing.json")), FormatError);
}

TEST_CASE("polylines round trip", "[io]") {
  const std::vector<Point3> pts{{0, 0, 0}, {1e-300, -2.5, 3.0}, {0.1, 0.2, 0.3}};
  const auto back = polyline_from_json(parse_json(dump(polyline_to_json("p", pts)), "p"));
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(back[i] == pts[i]);
  const Json s = sphere_polyline_to_json("s", pts);
  CHECK(s["space"] == "S3");
  for (const auto& e : s["samples"]) {
    const double n2 = e[0].get<double>() * e[0].get<double>() + e[1].get<double>() * e[1].get<double>() +
                      e[2].get<double>() * e[2].get<double>() + e[3].get<double>() * e[3].get<double>();
    CHECK(std::fabs(n2 - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(polyline_from_json(s), FormatError);
}

TEST_CASE("tube charts reload exactly", "[io]") {
  const auto m = realize(mazur_knot(400));
  const auto j = parse_json(dump(chart_to_json(m.chart(), "LM")), "chart");
  const TubeChart c = chart_from_json(j);
  CHECK(c.r0() == m.chart().r0());
  CHECK(c.holonomy() == m.chart().holonomy());
  CHECK(c.frame_rotation() == m.chart().frame_rotation());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(-3.0, 3.0);
  std::uniform_real_distribution<double> a(-1.4, 1.4);
  for (int i = 0; i < 200; ++i) {
    const CylinderPoint p{t(rng), a(rng), a(rng)};
    CHECK(c.map(p) == m.chart().map(p));
  }
  CHECK(dump(chart_to_json(c, "LM")) == dump(j));
  Json wrong = j;
  wrong["kind"] = "knot";
  CHECK_THROWS_AS(chart_from_json(wrong), FormatError);
}

TEST_CASE("run configuration", "[io]") {
  const RunConfig d;
  const RunConfig back = parse_config(config_text(d));
  CHECK(config_text(back) == config_text(d));
  const auto c = parse_config(
      "# comment\n[knot]\nname = \"LM\"  # trailing\nresolution = 400\n"
      "[field]\nraw = true\n[tolerances]\nprofile = \"strict\"\n[output]\nseed = 42\n");
  CHECK(c.knot == "LM");
  CHECK(c.resolution == 400);
  CHECK(c.raw_field);
  CHECK(c.realize_options().flow.raw);
  CHECK(c.seed == 42);
  CHECK(c.tolerances().differential < Tolerances{}.differential);
  CHECK_THROWS_AS(parse_config("[knot]\ncolour = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[knot]\nresolution = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[knot]\nresolution = -5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[knot\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[field]\ncutoff_inner = 1.9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[field]\nraw = yes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tolerances]\nprofile = \"loose\"\n"), ConfigError);
}

TEST_CASE("catalog lookup", "[io]") {
  for (const auto& e : catalog_entries()) {
    const auto k = catalog_knot(e.name, 128);
    REQUIRE(k.has_value());
    CHECK(std::abs(s1_degree(*k)) == 1);
  }
  CHECK_FALSE(catalog_knot("LM_n0", 128).has_value());
  CHECK_FALSE(catalog_knot("LM_nx", 128).has_value());
  CHECK_FALSE(catalog_knot("trefoil", 128).has_value());
  const fs::path p = scratch("custom.json");
  save_knot(p, standard_hopf({1, 0, 0}, 32));
  CHECK(resolve_knot(p.string(), 128).samples.size() == 33);
  CHECK_THROWS_AS(resolve_knot("nonexistent", 128), ConfigError);
}

TEST_CASE("svg and obj output", "[io]") {
  const auto svg = plot_knots_svg({standard_hopf({0, 0, 1}, 64), mazur_knot(200)}, "knots & <curves>");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("&amp;") != std::string::npos);
  CHECK(svg.find("<curves>") == std::string::npos);
  CHECK(count(svg, "<polyline") >= 4);
  const auto lines = plot_polylines_svg({{"a", {{0, 0, 0}, {1, 1, 0}}}}, "lines", 0, 1, {{0.5, 0.5, 0}});
  CHECK(count(lines, "<circle") == 1);

  const auto obj = polylines_obj({{"a", {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}}, {"b", {{0, 0, 1}, {0, 1, 1}}}});
  CHECK(count(obj, "\nv ") + (obj.rfind("v ", 0) == 0) == 5);
  CHECK(obj.find("l 1 2 3\n") != std::string::npos);
  CHECK(obj.find("l 4 5\n") != std::string::npos);

  const auto m = realize(standard_hopf({0, 0, 1}, 64));
  const auto tube = tube_obj(m.chart(), -1.0, 1.0, 10, 8);
  CHECK(count(tube, "\nv ") == 11 * 8);
  CHECK(count(tube, "\nf ") == 10 * 8);
}

TEST_CASE("atomic writes replace whole files", "[io]") {
  const fs::path p = scratch("atomic.txt");
  write_atomic(p, "first version, longer\n");
  write_atomic(p, "second\n");
  CHECK(read_file(p) == "second\n");
  CHECK_FALSE(fs::exists(fs::path(p) += ".tmp"));
  CHECK_THROWS_AS(write_atomic(scratch("atomic.txt") / "child", "x"), std::exception);
}

TEST_CASE("shipped knot files match the catalog", "[io]") {
  for (const auto& e : catalog_entries()) {
    INFO(e.name);
    const fs::path p = fs::path(HOPFMS_TEST_DATA_DIR) / "knots" / (e.name + ".json");
    REQUIRE(fs::exists(p));
    CHECK(read_file(p) == dump(knot_to_json(*catalog_knot(e.name, 800))));
    CHECK(resolve_knot(p.string(), 800).samples.size() == 801);
  }
}
