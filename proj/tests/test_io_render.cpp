#include <filesystem>
#include <regex>
#include <set>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "scenepath/error.hpp"
#include "scenepath/io.hpp"
#include "scenepath/render.hpp"

using namespace scenepath;

namespace {

int count(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

std::set<std::string> stroke_colors(const std::string& svg, const std::string& element) {
  std::set<std::string> out;
  const std::regex re("<" + element + "[^>]*stroke=\"(#[0-9a-f]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.insert((*it)[1]);
  }
  return out;
}

PathLayer constant_layer(double v) {
  PathLayer l;
  l.name = "p";
  for (int i = 0; i < 10; ++i) {
    l.points.push_back({0.5 * i, 1.0});
    l.speeds.push_back(v);
  }
  return l;
}

Scene small_scene() {
  Scene s = fixtures::flat(9, 25);
  fixtures::add_wall(s, {2.0, 0.0}, {2.5, 1.0});
  fixtures::add_top(s, {4.0, 0.0}, {5.0, 2.0}, 0.9);
  fixtures::add_landmark(s, "a & b", {{0.0, 0.0}});
  return s;
}

}  // namespace

TEST_CASE("colormap anchors") {
  CHECK(speed_color(0.2) == "#0000ff");
  CHECK(speed_color(1.0) == "#0000ff");
  CHECK(speed_color(3.5) == "#ff0000");
  CHECK(speed_color(5.0) == "#ff0000");
  CHECK(speed_color(2.25) == "#00ff00");  // hue 120
  RenderSpec bad;
  bad.v_red = bad.v_blue;
  CHECK_THROWS_AS(speed_color(1.0, bad), Error);
}

TEST_CASE("constant-speed paths render in one colour") {
  const Scene s = small_scene();
  const std::string red = render_svg(s, {constant_layer(5.0)});
  CHECK(stroke_colors(red, "line") == std::set<std::string>{"#ff0000"});
  CHECK(stroke_colors(red, "polyline") == std::set<std::string>{"#ff0000"});
  const std::string blue = render_svg(s, {constant_layer(1.0)});
  CHECK(stroke_colors(blue, "line") == std::set<std::string>{"#0000ff"});
}

TEST_CASE("one polyline per layer, escaped text, stable bytes") {
  const Scene s = small_scene();
  PathLayer ref = constant_layer(2.0);
  ref.speeds.clear();
  ref.dashed = true;
  const std::string svg = render_svg(s, {constant_layer(2.0), ref, constant_layer(3.0)});
  CHECK(count(svg, "<polyline") == 3);
  CHECK(count(svg, "stroke-dasharray") == 1);
  CHECK(svg.find("a &amp; b") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  CHECK(svg == render_svg(s, {constant_layer(2.0), ref, constant_layer(3.0)}));
  RenderSpec zero;
  zero.scale = 0.0;
  CHECK_THROWS_AS(render_svg(s, {}, zero), Error);
}

TEST_CASE("pareto plot marks every row") {
  std::vector<SlalomRow> rows(3);
  rows[0] = {"qp", "qp", 2, 0.5, 1.0, 10, 10, 0.0, 0.1, 0, 0, true, true};
  rows[1] = {"c1", "constant", 0, 0, 1.0, 20, 20, 0.0, 0.2, 0, 0, false, false};
  rows[2] = {"c3", "constant", 0, 0, 3.0, 8, 8, 1.0, 3.0, 0, 0, true, true};
  const std::string svg = pareto_svg(rows, true);
  CHECK(count(svg, "<circle") == 1);
  CHECK(count(svg, "<rect x=\"") == 2 + 1);
  CHECK(svg.find("disposition") != std::string::npos);
  CHECK(pareto_svg(rows, false).find("failure rate") != std::string::npos);
}

TEST_CASE("csv to json") {
  const std::string j = csv_to_json("a,b,c\n1,2.5,x\n-3,inf,\n");
  CHECK(j == "[\n  {\n    \"a\": 1,\n    \"b\": 2.5,\n    \"c\": \"x\"\n  },\n  {\n    \"a\": -3,\n    \"b\": null,\n"
             "    \"c\": \"\"\n  }\n]\n");
}

TEST_CASE("tables use shortest round-trip numbers") {
  GeometricPath p;
  PathSample a;
  a.position = {0.1, 1.0 / 3.0};
  p.samples.push_back(a);
  const std::string csv = path_csv(p);
  CHECK(csv.find("0.1,0.3333333333333333,") != std::string::npos);
  CHECK(std::stod("0.3333333333333333") == 1.0 / 3.0);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "scenepath_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string f = (dir / "x.txt").string();
  write_text_file(f, "hello\n");
  CHECK(read_text_file(f) == "hello\n");
  try {
    read_text_file((dir / "missing").string());
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  std::filesystem::remove_all(dir.parent_path());
}
