#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenepath/bench.hpp"
#include "scenepath/sim.hpp"

using namespace scenepath;

namespace {

GeometricPath straight(double length) {
  GeometricPath p;
  const int n = static_cast<int>(std::round(length / 0.25));
  for (int i = 0; i <= n; ++i) {
    PathSample s;
    s.s = 0.25 * i;
    s.position = {s.s, 1.0};
    p.samples.push_back(s);
  }
  return p;
}

TrackerParams quiet() {
  TrackerParams t;
  t.sigma.fill(0.0);
  return t;
}

SimConfig quiet_sim() {
  SimConfig c;
  c.planner = consistent(c.planner);
  c.tracker.sigma.fill(0.0);
  c.record_trace = true;
  return c;
}

}  // namespace

TEST_CASE("matched start on a straight trajectory tracks within a millimetre") {
  const GeometricPath path = straight(14.0);
  const SpeedProfile prof = constant_speed_profile(path, 1.0);
  const Trajectory traj = to_trajectory(path, prof, 30.0);
  const Scene scene = fixtures::flat(9, 65);
  const TrackerParams tp = quiet();
  Rng rng(1);
  AgentState st;
  st.position = {0.0, 1.0};
  st.speed = 1.0;
  double s_hint = 0.0;
  const double dt = 1.0 / 30.0;
  double worst = 0.0;
  while (st.t < 10.0) {
    const TrackingTarget tgt = tracking_target(traj, st.t, st, tp, &path, &s_hint);
    st = step(st, tgt, scene, tp, dt, rng);
    worst = std::max(worst, distance(st.position, traj.sample(st.t).position));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("speed command above the crawl envelope is capped") {
  const Scene scene = fixtures::flat(9, 65);
  const TrackerParams tp = quiet();
  Rng rng(2);
  AgentState st;
  st.head_z = 0.4;
  st.speed = 0.5;
  TrackingTarget tgt;
  tgt.pursuit = {100.0, 0.0};
  tgt.reference = {100.0, 0.0};
  tgt.tangent = {1.0, 0.0};
  tgt.speed = 4.0;
  tgt.head_z = 0.4;
  for (int i = 0; i < 300; ++i) {
    st = step(st, tgt, scene, tp, 1.0 / 30.0, rng);
    CHECK(st.speed <= 1.0 + 1e-12);
  }
  CHECK(st.speed == doctest::Approx(1.0));
}

TEST_CASE("turn rate is clamped") {
  const Scene scene = fixtures::flat(9, 65);
  const TrackerParams tp = quiet();
  Rng rng(3);
  AgentState st;
  st.position = {2.0, 1.0};
  st.speed = 0.5;
  TrackingTarget tgt;
  tgt.pursuit = {2.0, 6.0};
  tgt.reference = tgt.pursuit;
  tgt.tangent = {0.0, 1.0};
  tgt.speed = 0.5;
  const double dt = 1.0 / 30.0;
  const AgentState next = step(st, tgt, scene, tp, dt, rng);
  CHECK(next.heading == doctest::Approx(tp.turn_rate_max * dt).epsilon(1e-12));
}

TEST_CASE("flat walk between two landmarks") {
  Scene s = fixtures::flat(33, 81);
  fixtures::add_landmark(s, "a", {{2.0, 4.0}});
  fixtures::add_landmark(s, "b", {{17.0, 4.0}});
  const RouteRequest r = parse_route({"Walk to the b"}, "a", s);
  const RunReport rep = run_route(s, r, quiet_sim(), 4);
  CHECK(rep.success);
  CHECK(rep.failure.empty());
  CHECK(rep.xy_err < 0.05);
  CHECK(rep.collision_events.empty());
  REQUIRE(rep.segments.size() == 1);
  CHECK(rep.segments[0].reached);
  double sum = 0.0;
  for (const TraceRow& t : rep.trace) sum += distance(t.position, t.ref_position);
  CHECK(sum / rep.trace.size() == doctest::Approx(rep.xy_err).epsilon(1e-9));
}

TEST_CASE("route under a 0.9 m ceiling crouches and slows") {
  Scene s = fixtures::flat(33, 81);
  fixtures::add_top(s, {8.0, 0.0}, {11.0, 8.0}, 0.9);
  fixtures::add_landmark(s, "a", {{2.0, 4.0}});
  fixtures::add_landmark(s, "b", {{17.0, 4.0}});
  const RouteRequest r = parse_route({"Run to the b"}, "a", s);
  const RunReport rep = run_route(s, r, quiet_sim(), 4);
  CHECK(rep.success);
  int under = 0;
  for (const TraceRow& t : rep.trace) {
    CHECK(t.speed <= oracle::envelope(t.head_z) + 1e-9);
    if (t.position.x > 8.3 && t.position.x < 10.7) {
      ++under;
      CHECK(t.head_z == doctest::Approx(0.8));
      CHECK(t.speed <= 3.0 + 1e-9);
    }
  }
  CHECK(under > 0);
  CHECK(rep.z_err < 0.05);
}

TEST_CASE("crossing obstacle triggers a replan and no collision") {
  const Scene s = make_crossing(11, 0);
  const RunReport rep = run_route(s, crossing_route(s), quiet_sim(), 11);
  CHECK(rep.replan_count >= 1);
  CHECK(rep.collision_events.empty());
  CHECK(rep.success);
  const DynamicObstacle& o = s.dynamic_obstacles[0];
  for (const TraceRow& t : rep.trace) CHECK(distance(t.position, o.position(t.t)) >= 0.3 + o.radius);
}

TEST_CASE("same seed same run") {
  const Scene s = randomize_scene(4);
  Rng rng(4);
  const RouteRequest r = random_route(s, rng);
  SimConfig c = quiet_sim();
  c.tracker.sigma = {0.02, 0.02, 0.02, 0.02};
  const RunReport a = run_route(s, r, c, 99);
  const RunReport b = run_route(s, r, c, 99);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].position == b.trace[i].position);
    CHECK(a.trace[i].speed == b.trace[i].speed);
  }
}
