#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "scenepath/error.hpp"
#include "scenepath/rng.hpp"
#include "scenepath/speed_profile.hpp"

using namespace scenepath;

namespace {

GeometricPath straight(double length, double spacing = 0.25, double head_z = 1.47, double curvature = 0.0) {
  GeometricPath p;
  p.spacing = spacing;
  const int n = static_cast<int>(std::round(length / spacing));
  for (int i = 0; i <= n; ++i) {
    PathSample s;
    s.s = i * spacing;
    s.position = {s.s, 0.0};
    s.head_z = head_z;
    s.curvature = curvature;
    p.samples.push_back(s);
  }
  return p;
}

SpeedProblem problem(const GeometricPath& path, double cap, double v_start, std::optional<double> v_end) {
  SpeedProblem p;
  for (const PathSample& s : path.samples) p.s.push_back(s.s);
  p.caps.assign(p.s.size(), cap);
  p.v_start = v_start;
  p.v_end = v_end;
  return p;
}

}  // namespace

TEST_CASE("envelope anchors") {
  CHECK(envelope_vmax(0.4) == 1.0);
  CHECK(envelope_vmax(0.8) == 3.0);
  CHECK(envelope_vmax(1.2) == 5.0);
  CHECK(envelope_vmax(1.47) == 5.0);
  for (double z = 0.4; z <= 1.47; z += 0.01) CHECK(envelope_vmax(z) == doctest::Approx(oracle::envelope(z)));
}

TEST_CASE("speed caps") {
  const LocomotionType walk = locomotion(Gait::Walk);
  for (double c : point_speed_caps(straight(5.0), {}, walk)) CHECK(c == std::min(walk.speed_max, 5.0));

  EnvelopeParams env;
  env.a_lat_max = 2.0;
  for (double c : point_speed_caps(straight(5.0, 0.25, 1.47, 0.5), env, locomotion(Gait::Run))) {
    CHECK(c == doctest::Approx(2.0));
  }
  for (double c : point_speed_caps(straight(5.0, 0.25, 0.4, 0.01), env, locomotion(Gait::Crawl))) CHECK(c <= 1.0);
  for (double c : point_speed_caps(straight(5.0, 0.25, 0.4), env, locomotion(Gait::Run))) CHECK(c <= 1.0);
}

TEST_CASE("uphill caps are derated") {
  GeometricPath p = straight(4.0);
  for (PathSample& s : p.samples) s.ground_z = 0.5 * s.s;
  const auto caps = point_speed_caps(p, {}, locomotion(Gait::Walk));
  CHECK(caps[4] == doctest::Approx(locomotion(Gait::Walk).speed_max / 1.5));
}

TEST_CASE("accelerate then cruise, closed form") {
  SpeedProblem p = problem(straight(10.0), 2.0, 0.0, std::nullopt);
  p.a_max = 0.5;
  p.a_min = -0.1;
  const SpeedProfile qp = solve_min_time_qp(p);
  CHECK(qp.completion_time == doctest::Approx(7.0).epsilon(1e-6));
  CHECK(qp.v.back() == doctest::Approx(2.0).epsilon(1e-6));
  const SpeedProfile fb = forward_backward_oracle(p);
  CHECK(fb.completion_time == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("constant feasible profile is optimal") {
  const SpeedProfile qp = solve_min_time_qp(problem(straight(6.0), 1.7, 1.7, 1.7));
  for (double b : qp.beta) CHECK(b == doctest::Approx(1.7 * 1.7).epsilon(1e-7));
  CHECK(qp.completion_time == doctest::Approx(6.0 / 1.7).epsilon(1e-6));
}

TEST_CASE("dip to zero gives the deceleration and acceleration wedge") {
  SpeedProblem p = problem(straight(20.0), 3.0, 0.0, 0.0);
  const std::size_t mid = p.s.size() / 2;
  p.caps[mid] = 0.0;
  const SpeedProfile fb = forward_backward_oracle(p);
  const SpeedProfile qp = solve_min_time_qp(p);
  const double sd = p.s[mid];
  for (std::size_t i = 0; i < p.s.size(); ++i) {
    double want = 9.0;
    want = std::min(want, i <= mid ? 2.0 * 0.1 * (sd - p.s[i]) : 2.0 * 0.5 * (p.s[i] - sd));
    want = std::min(want, 2.0 * 0.5 * p.s[i]);
    want = std::min(want, 2.0 * 0.1 * (p.s.back() - p.s[i]));
    CHECK(fb.beta[i] == doctest::Approx(want).epsilon(1e-9));
    CHECK(qp.beta[i] == doctest::Approx(want).epsilon(1e-6));
  }
  CHECK(qp.stalled_segments.empty());
}

TEST_CASE("triangular profile peak") {
  SpeedProblem p = problem(straight(15.0), oracle::kInf, 0.0, 0.0);
  const SpeedProfile qp = solve_min_time_qp(p);
  const double peak = std::sqrt(2 * 0.5 * 0.1 * 15.0 / 0.6);
  double vmax = 0.0;
  for (double v : qp.v) vmax = std::max(vmax, v);
  CHECK(vmax == doctest::Approx(peak).epsilon(1e-6));
}

TEST_CASE("QP matches the two-pass oracle on random instances") {
  Rng rng(42);
  for (int k = 0; k < 40; ++k) {
    const int n = 2 + static_cast<int>(rng.below(200));
    SpeedProblem p;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      p.s.push_back(s);
      s += rng.uniform(0.05, 0.5);
      p.caps.push_back(rng.uniform() < 0.1 ? oracle::kInf : rng.uniform(0.0, 5.0));
    }
    p.a_max = rng.uniform(0.2, 2.0);
    p.a_min = -rng.uniform(0.05, 2.0);
    const auto free = oracle::max_beta(p.s, p.caps, p.a_max, p.a_min, 0.0, std::nullopt);
    REQUIRE(free);
    p.v_start = std::sqrt(rng.uniform() * (*free)[0]);
    const auto with_start = oracle::max_beta(p.s, p.caps, p.a_max, p.a_min, p.v_start, std::nullopt);
    REQUIRE(with_start);
    if (rng.uniform() < 0.5) p.v_end = std::sqrt(rng.uniform() * with_start->back());
    const auto want = oracle::max_beta(p.s, p.caps, p.a_max, p.a_min, p.v_start, p.v_end);
    REQUIRE(want);
    const SpeedProfile qp = solve_min_time_qp(p);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(qp.beta[i] - (*want)[i]));
    CHECK(err <= 1e-6);
    CHECK(profile_violation(p, qp) <= 1e-6);
  }
}

TEST_CASE("a nearly zero cap between fast stretches") {
  const GeometricPath path = straight(20.0);
  SpeedProblem p = problem(path, 3.0, 0.0, std::nullopt);
  p.a_max = 1.0;
  p.a_min = -1.0;
  p.caps[40] = 2e-4;  // beta bound 4e-8
  const SpeedProfile qp = solve_min_time_qp(p);
  const auto want = oracle::max_beta(p.s, p.caps, p.a_max, p.a_min, 0.0, std::nullopt);
  REQUIRE(want);
  double err = 0.0;
  for (std::size_t i = 0; i < p.s.size(); ++i) err = std::max(err, std::abs(qp.beta[i] - (*want)[i]));
  CHECK(err <= 1e-9);
  CHECK(qp.diagnostics.polished);
}

TEST_CASE("infeasible boundary speeds are reported") {
  SpeedProblem p = problem(straight(1.0), 2.0, 0.0, 2.0);
  try {
    solve_min_time_qp(p);
    FAIL("expected infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("largest feasible start speed") {
  SpeedProblem p = problem(straight(5.0), 3.0, 0.0, 0.0);
  // braking over 5 m at 0.1 m/s^2
  CHECK(max_feasible_start_speed(p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("trajectory sampling") {
  const GeometricPath path = straight(12.0);
  SpeedProblem p = problem(path, 2.0, 2.0, 2.0);
  const SpeedProfile prof = forward_backward_oracle(p);
  const Trajectory t = to_trajectory(path, prof, 2.0);
  for (std::size_t i = 1; i + 1 < t.waypoints.size(); ++i) {
    CHECK(t.waypoints[i].s - t.waypoints[i - 1].s == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(t.waypoints.back().s == doctest::Approx(path.length()).epsilon(1e-9));
  CHECK(t.waypoints.size() == static_cast<std::size_t>(std::ceil(6.0 * 2.0)) + 1);

  SpeedProblem acc = problem(straight(30.0), 5.0, 0.0, std::nullopt);
  const SpeedProfile ap = forward_backward_oracle(acc);
  const Trajectory at = to_trajectory(straight(30.0), ap, 30.0);
  double prev_step = 0.0;
  double travelled = 0.0;
  for (std::size_t i = 1; i < at.waypoints.size(); ++i) {
    const double step = at.waypoints[i].s - at.waypoints[i - 1].s;
    travelled += distance(at.waypoints[i].position, at.waypoints[i - 1].position);
    if (at.waypoints[i].v < 5.0 - 1e-9) CHECK(step > prev_step);
    prev_step = step;
  }
  CHECK(travelled == doctest::Approx(30.0).epsilon(1e-3 / 30.0));
}

TEST_CASE("trajectory sample interpolates in time") {
  const GeometricPath path = straight(4.0);
  const SpeedProfile prof = forward_backward_oracle(problem(path, 1.0, 1.0, 1.0));
  const Trajectory t = to_trajectory(path, prof, 10.0);
  CHECK(t.sample(1.25).position.x == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(t.sample(-1.0).position.x == 0.0);
  CHECK(t.sample(100.0).position.x == doctest::Approx(4.0));
}

TEST_CASE("training paths respect the envelope") {
  CHECK(sample_training_path(7).profile.v == sample_training_path(7).profile.v);
  double max_low = 0.0;
  long draws = 0;
  for (std::uint64_t seed = 0; draws < 100000 && seed < 20000; ++seed) {
    const TrainingSample ts = sample_training_path(seed);
    for (std::size_t i = 0; i < ts.path.size(); ++i) {
      const double z = ts.path.samples[i].head_z;
      REQUIRE(ts.profile.v[i] <= oracle::envelope(z) + 1e-12);
      if (z <= 0.4 + 1e-12) {
        max_low = std::max(max_low, ts.profile.v[i]);
        ++draws;
      }
    }
  }
  CHECK(draws >= 100000);
  CHECK(max_low <= 1.0);
  CHECK(max_low >= 0.99);
}
