#include <cmath>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenepath/error.hpp"
#include "scenepath/route_graph.hpp"
#include "scenepath/scene.hpp"

using namespace scenepath;

namespace {

const char* kMinimal = R"({
  "version": 1,
  "heightmap": {"origin": [0, 0], "cell_size": 0.25, "rows": 4, "cols": 4,
                "heights": [0,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0]},
  "static_obstacles": [], "top_obstacles": [], "dynamic_obstacles": [],
  "landmarks": [{"name": "a", "cells": [[0, 0]]}, {"name": "b", "cells": [[0.75, 0.75]]}]
})";

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("minimal scene document loads") {
  const Scene s = load_scene(kMinimal);
  CHECK(s.static_obstacles.empty());
  CHECK(s.top_obstacles.empty());
  CHECK(s.dynamic_obstacles.empty());
  CHECK(s.landmarks.size() == 2);
  CHECK(s.heightmap.rows == 4);
}

TEST_CASE("landmark inside a wall is rejected by name") {
  Scene s = fixtures::flat(9, 9);
  fixtures::add_wall(s, {0.5, 0.5}, {1.5, 1.5});
  fixtures::add_landmark(s, "shed", {{1.0, 1.0}});
  fixtures::add_landmark(s, "gate", {{0.0, 0.0}});
  try {
    validate(s);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("shed") != std::string::npos);
  }
}

TEST_CASE("save and load round trip") {
  Scene s = fixtures::flat(6, 8);
  s.heightmap.at(2, 3) = 0.125;
  fixtures::add_wall(s, {0.6, 0.6}, {0.9, 1.1});
  fixtures::add_top(s, {1.1, 0.1}, {1.6, 1.0}, 0.9);
  s.dynamic_obstacles.push_back({"ball", 0.3, BounceMotion{{0.2, 0.2}, {1.0, 0.5}, {0, 0}, {1.75, 1.25}}});
  s.dynamic_obstacles.push_back({"loop", 0.2, WaypointLoopMotion{{{0, 0}, {1, 0}, {1, 1}}, 0.7}});
  s.dynamic_obstacles.push_back({"line", 0.25, LinearMotion{{0, 1}, {0.5, -0.25}}});
  fixtures::add_landmark(s, "a", {{0.0, 0.0}, {0.25, 0.0}});
  fixtures::add_landmark(s, "b", {{1.75, 1.25}});
  const std::string doc = save_scene(s);
  const Scene back = load_scene(doc);
  CHECK(back == s);
  CHECK(save_scene(back) == doc);
  CHECK(doc.find("\"bounce\"") != std::string::npos);
  CHECK(doc.find("\"waypoint_loop\"") != std::string::npos);
}

TEST_CASE("saving a scene without landmarks fails") {
  Scene s = fixtures::flat(4, 4);
  CHECK(kind_of([&] { save_scene(s); }) == ErrorKind::Validation);
}

TEST_CASE("malformed documents give parse or validation errors") {
  CHECK(kind_of([] { load_scene("{not json"); }) == ErrorKind::Parse);
  std::string doc = kMinimal;
  doc.replace(doc.find("\"rows\": 4"), 9, "\"rows\": 5");
  CHECK(kind_of([&] { load_scene(doc); }) == ErrorKind::Validation);
}

TEST_CASE("terrain height is bilinear") {
  Scene s = fixtures::flat(2, 2, 1.0);
  CHECK(s.terrain_height({0.3, 0.7}) == 0.0);
  s.heightmap.at(1, 1) = 4.0;
  CHECK(s.terrain_height({1.0, 1.0}) == 4.0);
  CHECK(s.terrain_height({0.0, 0.0}) == 0.0);
  CHECK(s.terrain_height({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  // (1-u)(1-v) h00 + u(1-v) h01 + (1-u) v h10 + u v h11
  const double u = 0.3, v = 0.8;
  CHECK(s.terrain_height({u, v}) == doctest::Approx(u * v * 4.0).epsilon(1e-14));
}

TEST_CASE("clearance is the minimum over covering top obstacles") {
  Scene s = fixtures::flat(9, 9);
  CHECK(std::isinf(s.clearance_at({1.0, 1.0})));
  fixtures::add_top(s, {0.0, 0.0}, {1.5, 1.5}, 0.5);
  CHECK(s.clearance_at({1.0, 1.0}) == 0.5);
  fixtures::add_top(s, {0.5, 0.5}, {2.0, 2.0}, 0.9);
  CHECK(s.clearance_at({1.0, 1.0}) == 0.5);
  CHECK(s.clearance_at({1.8, 1.8}) == 0.9);
  CHECK(std::isinf(s.clearance_at({0.1, 1.9})));
}

TEST_CASE("motion rules") {
  CHECK(position_at(LinearMotion{{0, 0}, {1, 0}}, 2.0) == Vec2{2, 0});
  const Vec2 b = position_at(BounceMotion{{0, 0}, {1, 0}, {0, -1}, {3, 1}}, 4.0);
  CHECK(b.x == doctest::Approx(2.0));
  CHECK(b.y == doctest::Approx(0.0));
  const Vec2 w = position_at(WaypointLoopMotion{{{0, 0}, {0, 2}}, 1.0}, 3.0);
  CHECK(w.x == doctest::Approx(0.0));
  CHECK(w.y == doctest::Approx(1.0));

  // Reflect-walk oracle: unfold onto a line of period 2L.
  const BounceMotion bm{{0.4, 0.2}, {0.7, -1.3}, {0, 0}, {2, 1.5}};
  for (double t = 0.0; t < 20.0; t += 0.37) {
    auto fold = [](double x, double lo, double hi) {
      const double L = hi - lo;
      double u = std::fmod(x - lo, 2 * L);
      if (u < 0) u += 2 * L;
      return lo + (u <= L ? u : 2 * L - u);
    };
    const Vec2 p = position_at(bm, t);
    CHECK(p.x == doctest::Approx(fold(0.4 + 0.7 * t, 0, 2)).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(fold(0.2 - 1.3 * t, 0, 1.5)).epsilon(1e-9));
  }
}

TEST_CASE("obstacle lookup by id") {
  Scene s = fixtures::flat(4, 4);
  s.dynamic_obstacles.push_back({"x", 0.2, LinearMotion{{0, 0}, {0, 1}}});
  CHECK(s.obstacle_position("x", 0.5) == Vec2{0, 0.5});
  CHECK_THROWS_AS(s.obstacle_position("y", 0.0), Error);
}

TEST_CASE("randomized scene: four landmarks all mutually reachable") {
  const Scene s = randomize_scene(1);
  REQUIRE(s.landmarks.size() == 4);
  const GridGraph g = build_graph(s);
  oracle::UnionFind uf = oracle::components(g);
  for (const Landmark& a : s.landmarks) {
    for (const Landmark& b : s.landmarks) {
      bool joined = false;
      for (int na : landmark_nodes(g, a)) {
        for (int nb : landmark_nodes(g, b)) joined = joined || uf.find(na) == uf.find(nb);
      }
      CHECK_MESSAGE(joined, a.name << " -> " << b.name);
    }
  }
}

TEST_CASE("randomized scenes are deterministic") {
  CHECK(save_scene(randomize_scene(5)) == save_scene(randomize_scene(5)));
  CHECK(save_scene(randomize_scene(5)) != save_scene(randomize_scene(6)));
}

TEST_CASE("randomized scene without obstacles") {
  RandomSceneConfig cfg;
  cfg.walls = 0;
  cfg.top_obstacles = 0;
  const Scene s = randomize_scene(3, cfg);
  CHECK(s.static_obstacles.empty());
  CHECK(s.top_obstacles.empty());
  CHECK(s.dynamic_obstacles.empty());
}

TEST_CASE("impossible randomization exhausts its retries") {
  RandomSceneConfig cfg;
  cfg.size_x = 6.0;
  cfg.size_y = 6.0;
  cfg.landmark_separation = 20.0;
  cfg.retry_budget = 3;
  CHECK(kind_of([&] { randomize_scene(1, cfg); }) == ErrorKind::RetryExhausted);
}
