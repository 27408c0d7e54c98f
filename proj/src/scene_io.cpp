#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scenepath/error.hpp"
#include "scenepath/scene.hpp"

namespace scenepath {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSceneVersion = 1;

[[noreturn]] void bad(const std::string& where, const std::string& msg) { throw Error(ErrorKind::Validation, where, msg); }

void expect_keys(const json& j, const std::string& where, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) bad(where.empty() ? "/" : where, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!j.contains(k)) bad(where + "/" + k, "missing required key");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) bad(where + "/" + key, "unknown key");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

Vec2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where, "expected [x, y]");
  return {number(j[0], where + "/0"), number(j[1], where + "/1")};
}

std::vector<Vec2> points(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of points");
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "/" + std::to_string(i)));
  return out;
}

const json& array_at(const json& j, const char* key, const std::string& where) {
  const json& a = j.at(key);
  if (!a.is_array()) bad(where + "/" + key, "expected an array");
  return a;
}

MotionRule parse_rule(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) bad(where + "/kind", "missing rule kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "linear") {
    expect_keys(j, where, {"kind", "start", "velocity"});
    return LinearMotion{point(j["start"], where + "/start"), point(j["velocity"], where + "/velocity")};
  }
  if (kind == "waypoint_loop") {
    expect_keys(j, where, {"kind", "points", "speed"});
    return WaypointLoopMotion{points(j["points"], where + "/points"), number(j["speed"], where + "/speed")};
  }
  if (kind == "bounce") {
    expect_keys(j, where, {"kind", "start", "velocity", "bounds"});
    const json& b = j["bounds"];
    expect_keys(b, where + "/bounds", {"min", "max"});
    return BounceMotion{point(j["start"], where + "/start"), point(j["velocity"], where + "/velocity"),
                        point(b["min"], where + "/bounds/min"), point(b["max"], where + "/bounds/max")};
  }
  bad(where + "/kind", "unknown rule kind '" + kind + "'");
}

ordered_json point_json(Vec2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json points_json(const std::vector<Vec2>& pts) {
  ordered_json a = ordered_json::array();
  for (const Vec2& p : pts) a.push_back(point_json(p));
  return a;
}

ordered_json rule_json(const MotionRule& rule) {
  return std::visit(
      [](const auto& m) -> ordered_json {
        using T = std::decay_t<decltype(m)>;
        ordered_json r;
        if constexpr (std::is_same_v<T, LinearMotion>) {
          r["kind"] = "linear";
          r["start"] = point_json(m.start);
          r["velocity"] = point_json(m.velocity);
        } else if constexpr (std::is_same_v<T, WaypointLoopMotion>) {
          r["kind"] = "waypoint_loop";
          r["points"] = points_json(m.points);
          r["speed"] = m.speed;
        } else {
          r["kind"] = "bounce";
          r["start"] = point_json(m.start);
          r["velocity"] = point_json(m.velocity);
          r["bounds"] = {{"min", point_json(m.bounds_min)}, {"max", point_json(m.bounds_max)}};
        }
        return r;
      },
      rule);
}

}  // namespace

Scene load_scene(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, "/", std::string("malformed JSON: ") + e.what());
  }
  expect_keys(doc, "", {"version", "heightmap", "static_obstacles", "top_obstacles", "dynamic_obstacles", "landmarks"});
  if (integer(doc["version"], "/version") != kSceneVersion) bad("/version", "unsupported version");

  Scene scene;
  const json& hm = doc["heightmap"];
  expect_keys(hm, "/heightmap", {"origin", "cell_size", "rows", "cols", "heights"});
  scene.heightmap.origin = point(hm["origin"], "/heightmap/origin");
  scene.heightmap.cell_size = number(hm["cell_size"], "/heightmap/cell_size");
  scene.heightmap.rows = integer(hm["rows"], "/heightmap/rows");
  scene.heightmap.cols = integer(hm["cols"], "/heightmap/cols");
  const json& heights = array_at(hm, "heights", "/heightmap");
  scene.heightmap.heights.reserve(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) {
    scene.heightmap.heights.push_back(number(heights[i], "/heightmap/heights/" + std::to_string(i)));
  }

  const json& statics = array_at(doc, "static_obstacles", "");
  for (std::size_t i = 0; i < statics.size(); ++i) {
    const std::string where = "/static_obstacles/" + std::to_string(i);
    expect_keys(statics[i], where, {"polygon"});
    scene.static_obstacles.push_back({points(statics[i]["polygon"], where + "/polygon")});
  }
  const json& tops = array_at(doc, "top_obstacles", "");
  for (std::size_t i = 0; i < tops.size(); ++i) {
    const std::string where = "/top_obstacles/" + std::to_string(i);
    expect_keys(tops[i], where, {"polygon", "clearance_height"});
    scene.top_obstacles.push_back(
        {points(tops[i]["polygon"], where + "/polygon"), number(tops[i]["clearance_height"], where + "/clearance_height")});
  }
  const json& dyn = array_at(doc, "dynamic_obstacles", "");
  for (std::size_t i = 0; i < dyn.size(); ++i) {
    const std::string where = "/dynamic_obstacles/" + std::to_string(i);
    expect_keys(dyn[i], where, {"id", "radius", "rule"});
    if (!dyn[i]["id"].is_string()) bad(where + "/id", "expected a string");
    scene.dynamic_obstacles.push_back({dyn[i]["id"].get<std::string>(), number(dyn[i]["radius"], where + "/radius"),
                                       parse_rule(dyn[i]["rule"], where + "/rule")});
  }
  const json& lms = array_at(doc, "landmarks", "");
  for (std::size_t i = 0; i < lms.size(); ++i) {
    const std::string where = "/landmarks/" + std::to_string(i);
    expect_keys(lms[i], where, {"name", "cells"});
    if (!lms[i]["name"].is_string()) bad(where + "/name", "expected a string");
    scene.landmarks.push_back({lms[i]["name"].get<std::string>(), points(lms[i]["cells"], where + "/cells")});
  }
  validate(scene);
  return scene;
}

Scene load_scene(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scene(ss.str());
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path, "cannot open scene file");
  return load_scene(in);
}

std::string save_scene(const Scene& scene) {
  validate(scene);
  if (scene.landmarks.empty()) bad("/landmarks", "scene has no landmarks; routes would be undefined");
  ordered_json doc;
  doc["version"] = kSceneVersion;
  const HeightMap& hm = scene.heightmap;
  doc["heightmap"] = {{"origin", point_json(hm.origin)},
                      {"cell_size", hm.cell_size},
                      {"rows", hm.rows},
                      {"cols", hm.cols},
                      {"heights", hm.heights}};
  doc["static_obstacles"] = ordered_json::array();
  for (const StaticObstacle& o : scene.static_obstacles) {
    doc["static_obstacles"].push_back({{"polygon", points_json(o.footprint)}});
  }
  doc["top_obstacles"] = ordered_json::array();
  for (const TopObstacle& o : scene.top_obstacles) {
    doc["top_obstacles"].push_back({{"polygon", points_json(o.footprint)}, {"clearance_height", o.clearance_height}});
  }
  doc["dynamic_obstacles"] = ordered_json::array();
  for (const DynamicObstacle& o : scene.dynamic_obstacles) {
    doc["dynamic_obstacles"].push_back({{"id", o.id}, {"radius", o.radius}, {"rule", rule_json(o.rule)}});
  }
  doc["landmarks"] = ordered_json::array();
  for (const Landmark& l : scene.landmarks) {
    doc["landmarks"].push_back({{"name", l.name}, {"cells", points_json(l.cells)}});
  }
  return doc.dump(1) + "\n";
}

void save_scene_file(const Scene& scene, const std::string& path) {
  const std::string text = save_scene(scene);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, path, "cannot write scene file");
  out << text;
}

}  // namespace scenepath
