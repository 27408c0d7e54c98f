#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenepath/error.hpp"
#include "scenepath/planner.hpp"
#include "scenepath/refiner.hpp"

using namespace scenepath;

namespace {

double wall_distance(const Scene& s, Vec2 p) {
  double d = oracle::kInf;
  for (const StaticObstacle& o : s.static_obstacles) {
    if (oracle::inside(o.footprint, p)) return 0.0;
    for (std::size_t i = 0; i < o.footprint.size(); ++i) {
      const Vec2 a = o.footprint[i], b = o.footprint[(i + 1) % o.footprint.size()];
      const Vec2 ab = b - a;
      const double t = std::clamp(((p - a).x * ab.x + (p - a).y * ab.y) / (ab.x * ab.x + ab.y * ab.y), 0.0, 1.0);
      d = std::min(d, distance(p, a + ab * t));
    }
  }
  return d;
}

GeometricPath line_path(Vec2 a, Vec2 b, double spacing = 0.25) {
  GeometricPath p;
  p.spacing = spacing;
  const double len = distance(a, b);
  const int n = static_cast<int>(std::round(len / spacing));
  for (int i = 0; i <= n; ++i) {
    PathSample s;
    s.s = len * i / n;
    s.position = a + (b - a) * (static_cast<double>(i) / n);
    p.samples.push_back(s);
  }
  return p;
}

SpeedProfile constant_profile(const GeometricPath& path, double v) { return constant_speed_profile(path, v); }

}  // namespace

TEST_CASE("straight coarse path stays straight") {
  const Scene s = fixtures::flat(21, 41);
  std::vector<Vec2> coarse;
  for (int i = 0; i <= 32; ++i) coarse.push_back({0.25 * i, 2.5});
  const GeometricPath p = smooth_and_resample(coarse, s, {}, locomotion(Gait::Walk));
  CHECK_FALSE(p.degraded);
  CHECK(p.length() == doctest::Approx(8.0));
  for (const PathSample& smp : p.samples) {
    CHECK(smp.position.y == doctest::Approx(2.5));
    CHECK(smp.curvature == doctest::Approx(0.0));
  }
  for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK(p.samples[i].s - p.samples[i - 1].s == doctest::Approx(0.25));
}

TEST_CASE("L-shaped corner is smoothed and keeps clearance") {
  Scene s = fixtures::flat(41, 41);
  fixtures::add_wall(s, {3.0, -1.0}, {11.0, 7.0});  // inside corner block
  std::vector<Vec2> coarse;
  for (double y = 0.0; y <= 8.0 + 1e-9; y += 0.25) coarse.push_back({2.25, y});
  for (double x = 2.5; x <= 9.0 + 1e-9; x += 0.25) coarse.push_back({x, 8.0});
  const RefinerParams params;
  const GeometricPath p = smooth_and_resample(coarse, s, params, locomotion(Gait::Walk));
  CHECK_FALSE(p.degraded);
  double kmax = 0.0;
  for (const PathSample& smp : p.samples) {
    CHECK(wall_distance(s, smp.position) >= params.clearance_margin - 1e-9);
    kmax = std::max(kmax, smp.curvature);
  }
  CHECK(kmax < 1.0 / params.clearance_margin);
  CHECK(p.length() < polyline_length(coarse));
}

TEST_CASE("corridor of exactly twice the margin is degraded but clear") {
  Scene s = fixtures::flat(21, 41);
  fixtures::add_wall(s, {-1.0, -1.0}, {11.0, 2.1});
  fixtures::add_wall(s, {-1.0, 2.9}, {11.0, 6.0});
  std::vector<Vec2> coarse;
  for (double x = 0.0; x <= 8.0 + 1e-9; x += 0.25) coarse.push_back({x, 2.5});
  const RefinerParams params;
  const GeometricPath p = smooth_and_resample(coarse, s, params, locomotion(Gait::Walk));
  CHECK(p.degraded);
  for (const PathSample& smp : p.samples) CHECK(wall_distance(s, smp.position) > 0.0);
}

TEST_CASE("head height without ceilings is the gait height") {
  const Scene s = fixtures::flat(9, 41);
  GeometricPath p = line_path({0, 1}, {9, 1});
  p.locomotion = locomotion(Gait::Walk);
  assign_head_height(p, s, {});
  for (const PathSample& smp : p.samples) CHECK(smp.head_z == doctest::Approx(1.47));
}

TEST_CASE("head lowered under a 0.9 m ceiling with bounded ramps") {
  Scene s = fixtures::flat(9, 49);
  fixtures::add_top(s, {4.0, 0.0}, {6.0, 2.0}, 0.9);
  GeometricPath p = line_path({0, 1}, {12, 1});
  p.locomotion = locomotion(Gait::Walk);
  const RefinerParams params;
  assign_head_height(p, s, params);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const PathSample& smp = p.samples[i];
    const double c = oracle::clearance(s, smp.position);
    if (std::isfinite(c)) {
      CHECK(smp.head_z <= c - params.head_margin + 1e-9);
      if (smp.position.x > 4.3 && smp.position.x < 5.7) CHECK(smp.head_z == doctest::Approx(0.8));
    }
    if (i > 0) {
      CHECK(std::abs(smp.head_z - p.samples[i - 1].head_z) <=
            params.max_height_rate * (smp.s - p.samples[i - 1].s) + 1e-9);
    }
  }
  CHECK(p.samples.front().head_z == doctest::Approx(1.47));
  CHECK(p.samples.back().head_z == doctest::Approx(1.47));
}

TEST_CASE("ceiling below crawl height plus margin is impassable") {
  Scene s = fixtures::flat(9, 49);
  fixtures::add_top(s, {4.0, 0.0}, {6.0, 2.0}, 0.45);
  GeometricPath p = line_path({0, 1}, {12, 1});
  CHECK(find_impassable(p, s, {}).has_value());
  try {
    assign_head_height(p, s, {});
    FAIL("expected impassable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ImpassableTop);
  }
}

TEST_CASE("no dynamic obstacles, no forecasts") {
  const Scene s = fixtures::flat(9, 49);
  const GeometricPath p = line_path({0, 0}, {10, 0});
  CHECK(forecast_collisions(p, constant_profile(p, 1.0), s, 0.0, 0.0).empty());
}

TEST_CASE("head-on forecast matches closing speed") {
  Scene s = fixtures::flat(9, 49);
  s.dynamic_obstacles.push_back({"ball", 0.3, LinearMotion{{6.5, 0.0}, {-1.0, 0.0}}});
  const GeometricPath p = line_path({0, 0}, {10, 0});
  ForecastParams fp;
  fp.agent_radius = 0.4;
  fp.safety_margin = 0.0;
  // agent at s = 2 at t = 2, obstacle at 4.5: gap 2.5 minus radii 0.7 closing at 2 m/s
  const auto f = forecast_collisions(p, constant_profile(p, 1.0), s, 0.0, 2.0, fp);
  REQUIRE(f.size() == 1);
  CHECK(f[0].obstacle_id == "ball");
  CHECK(f[0].time_to_collision == doctest::Approx((2.5 - 0.7) / 2.0).epsilon(1e-6));
  CHECK(f[0].s == doctest::Approx(2.0 + 0.9).epsilon(1e-6));

  Scene far = s;
  far.dynamic_obstacles[0].rule = LinearMotion{{10.0, 0.0}, {-1.0, 0.0}};
  CHECK(forecast_collisions(p, constant_profile(p, 1.0), far, 0.0, 2.0, fp).empty());
}

TEST_CASE("constant-velocity prediction extrapolates the current velocity") {
  DynamicObstacle o{"b", 0.2, BounceMotion{{0, 0}, {1, 0}, {0, -1}, {3, 1}}};
  CHECK(predict_obstacle(o, 2.5, 4.0, PredictionMode::ConstantVelocity).x == doctest::Approx(2.5 + 1.5));
  CHECK(predict_obstacle(o, 2.5, 4.0, PredictionMode::Exact).x == doctest::Approx(2.0));
  CHECK(predict_obstacle(o, 1.0, 1.5, PredictionMode::ConstantVelocity).x == doctest::Approx(1.5));
}

TEST_CASE("replan sidesteps in an open field and re-forecasts clean") {
  Scene s = fixtures::flat(41, 81);
  fixtures::add_landmark(s, "w", {{1.0, 5.0}});
  fixtures::add_landmark(s, "e", {{19.0, 5.0}});
  s.dynamic_obstacles.push_back({"ball", 0.3, LinearMotion{{8.0, 5.0}, {-0.5, 0.0}}});
  PlannerConfig cfg = consistent({});
  const GridGraph g = build_graph(s, cfg.graph);
  const CoarsePath coarse = astar_to_landmark(g, {1.0, 5.0}, s.landmark("e"));
  GeometricPath p = smooth_and_resample(coarse.points(g), s, cfg.refiner, locomotion(Gait::Walk));
  const SpeedProfile prof = constant_profile(p, 1.0);
  const double t_now = 3.5;
  const auto f = forecast_collisions(p, prof, s, 0.0, t_now, cfg.forecast);
  REQUIRE(f.size() == 1);
  const DiskConstraint d = forecast_constraint(f[0], s.dynamic_obstacles[0], t_now, cfg.forecast);
  const Vec2 here = p.position_at(t_now);
  const ReplanResult rr = replan_with_forecast(g, here, s.landmark("e"), {d}, coarse);
  CHECK_FALSE(rr.unavoidable);
  const GeometricPath np = smooth_and_resample(rr.path.points(g), s, cfg.refiner, locomotion(Gait::Walk), {d});
  for (const PathSample& smp : np.samples) CHECK(d.distance_to(smp.position) >= d.radius - 1e-9);
  CHECK(forecast_collisions(np, constant_profile(np, 1.0), s, t_now, t_now, cfg.forecast).empty());
}

TEST_CASE("fully blocked corridor is unavoidable") {
  Scene s = fixtures::flat(21, 81);
  fixtures::add_wall(s, {-1.0, -1.0}, {21.0, 1.2});
  fixtures::add_wall(s, {-1.0, 2.8}, {21.0, 6.0});
  fixtures::add_landmark(s, "w", {{1.0, 2.0}});
  fixtures::add_landmark(s, "e", {{19.0, 2.0}});
  s.dynamic_obstacles.push_back({"cart", 0.8, LinearMotion{{10.0, 2.0}, {-1.0, 0.0}}});
  const PlannerConfig cfg = consistent({});
  const GridGraph g = build_graph(s, cfg.graph);
  const CoarsePath coarse = astar_to_landmark(g, {1.0, 2.0}, s.landmark("e"));
  GeometricPath p = smooth_and_resample(coarse.points(g), s, cfg.refiner, locomotion(Gait::Walk));
  const SpeedProfile prof = constant_profile(p, 1.0);
  const double t_now = 4.0;
  const auto f = forecast_collisions(p, prof, s, 0.0, t_now, cfg.forecast);
  REQUIRE(f.size() == 1);
  const DiskConstraint d = forecast_constraint(f[0], s.dynamic_obstacles[0], t_now, cfg.forecast);
  const ReplanResult rr = replan_with_forecast(g, p.position_at(4.0), s.landmark("e"), {d}, coarse);
  CHECK(rr.unavoidable);
  CHECK(rr.path.nodes == coarse.nodes);
}

TEST_CASE("forecasts on a bouncing obstacle are repeatable") {
  Scene s = fixtures::flat(21, 81);
  s.dynamic_obstacles.push_back({"b", 0.3, BounceMotion{{6.0, 0.5}, {0.0, 1.5}, {0.0, 0.0}, {20.0, 5.0}}});
  const GeometricPath p = line_path({0, 2.5}, {20, 2.5});
  const SpeedProfile prof = constant_profile(p, 1.2);
  for (double t = 0.0; t < 10.0; t += 0.5) {
    const auto a = forecast_collisions(p, prof, s, 0.0, t);
    const auto b = forecast_collisions(p, prof, s, 0.0, t);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].time_to_collision == b[i].time_to_collision);
      CHECK(a[i].time_to_collision <= 1.5);
    }
  }
}
