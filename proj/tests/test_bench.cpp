#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "scenepath/bench.hpp"
#include "scenepath/error.hpp"

using namespace scenepath;

namespace {

int lateral_reversals(const GeometricPath& p) {
  int sign = 0, flips = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double dy = p.samples[i].position.y - p.samples[i - 1].position.y;
    if (std::abs(dy) < 1e-6) continue;
    const int s = dy > 0 ? 1 : -1;
    if (sign != 0 && s != sign) ++flips;
    sign = s;
  }
  return flips;
}

GeometricPath plan_slalom(const Scene& s) {
  const PlannerConfig cfg = consistent({});
  const GridGraph g = build_graph(s, cfg.graph);
  const RouteRequest r = parse_route({"Run to the finish"}, "start", s);
  return plan_route(s, g, r, cfg).segments.at(0).path;
}

}  // namespace

TEST_CASE("slalom path weaves around every baffle") {
  const SlalomParams params;
  const GeometricPath p = plan_slalom(make_slalom(params));
  CHECK(lateral_reversals(p) >= params.baffles);
}

TEST_CASE("slalom narrower than the agent is unreachable") {
  SlalomParams params;
  params.corridor_width = 0.7;
  params.gap = 0.5;
  try {
    plan_slalom(make_slalom(params));
    FAIL("expected a planning error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unreachable);
  }
}

TEST_CASE("bench scenes are deterministic") {
  CHECK(save_scene(make_slalom()) == save_scene(make_slalom()));
  CHECK(save_scene(make_pyramid()) == save_scene(make_pyramid()));
  CHECK(save_scene(make_crossing(3, 7)) == save_scene(make_crossing(3, 7)));
  CHECK(save_scene(make_crossing(3, 7)) != save_scene(make_crossing(3, 8)));
}

TEST_CASE("pyramid heights") {
  const PyramidParams p;
  const Scene s = make_pyramid(p);
  CHECK(s.terrain_height({0.0, 0.0}) == doctest::Approx(p.peak));
  CHECK(s.terrain_height({p.half_width / 2, 0.0}) == doctest::Approx(p.peak / 2));
  CHECK(s.terrain_height({p.half_width + 1.0, 1.0}) == 0.0);
}

TEST_CASE("pyramid detour depends on the slope weight") {
  const PyramidParams params;
  const Polygon fp = pyramid_footprint(params);
  const auto rows = pyramid_sweep({0.0, 3.0}, params);
  CHECK(rows[0].inside_length > 0.0);
  CHECK(rows[1].inside_length == 0.0);
  CHECK(rows[1].path_length > rows[0].path_length);
  CHECK(rows[1].climb < rows[0].climb);
}

TEST_CASE("length inside a footprint") {
  GeometricPath p;
  for (int i = 0; i <= 40; ++i) {
    PathSample s;
    s.s = 0.25 * i;
    s.position = {-5.0 + 0.25 * i, 0.0};
    p.samples.push_back(s);
  }
  CHECK(length_inside(p, make_rect({-1.0, -1.0}, {1.0, 1.0})) == doctest::Approx(2.0));
  CHECK(length_inside(p, make_rect({-1.0, 0.0}, {1.0, 1.0})) == 0.0);
  CHECK(length_inside(p, make_rect({6.0, -1.0}, {7.0, 1.0})) == 0.0);
}

TEST_CASE("pareto marking matches brute force") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SlalomRow> rows(2 + rng.below(10));
    for (SlalomRow& r : rows) {
      r.mean_time = static_cast<double>(rng.below(5));
      r.failure_rate = static_cast<double>(rng.below(5)) / 4.0;
      r.mean_disposition = rng.uniform();
    }
    mark_pareto(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      bool dom_f = false, dom_d = false;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const SlalomRow &a = rows[j], &b = rows[i];
        dom_f = dom_f || (a.mean_time <= b.mean_time && a.failure_rate <= b.failure_rate &&
                          (a.mean_time < b.mean_time || a.failure_rate < b.failure_rate));
        dom_d = dom_d || (a.mean_time <= b.mean_time && a.mean_disposition <= b.mean_disposition &&
                          (a.mean_time < b.mean_time || a.mean_disposition < b.mean_disposition));
      }
      CHECK(rows[i].pareto_failure == !dom_f);
      CHECK(rows[i].pareto_disposition == !dom_d);
    }
  }
}

TEST_CASE("slalom baselines order by speed") {
  SlalomBenchConfig cfg;
  cfg.runs = 20;
  cfg.qp_configs.resize(1);
  const SlalomBenchResult r = slalom_bench(cfg, 5);
  const SlalomRow* slow = nullptr;
  const SlalomRow* fast = nullptr;
  for (const SlalomRow& row : r.rows) {
    if (row.kind != "constant") continue;
    if (!slow || row.speed < slow->speed) slow = &row;
    if (!fast || row.speed > fast->speed) fast = &row;
  }
  REQUIRE(slow);
  REQUIRE(fast);
  CHECK(slow->failure_rate <= 0.05);
  for (const SlalomRow& row : r.rows) {
    CHECK(row.mean_time <= slow->mean_time);
    if (row.kind == "constant") CHECK(row.failure_rate <= fast->failure_rate);
  }
  CHECK(r.matched_constant.mean_disposition > r.matched_adaptive.mean_disposition);
  CHECK(r.matched_constant.speed == doctest::Approx(r.matched_adaptive.speed));
}

TEST_CASE("randomized routes chain through distinct landmarks") {
  const Scene s = randomize_scene(2);
  Rng rng(2);
  const RouteRequest r = random_route(s, rng);
  REQUIRE(r.instructions.size() == 3);
  for (std::size_t i = 0; i < r.instructions.size(); ++i) {
    CHECK(r.instructions[i].source != r.instructions[i].target);
    if (i > 0) CHECK(r.instructions[i].source == r.instructions[i - 1].target);
  }
}

TEST_CASE("randomized bench is deterministic") {
  RandomBenchConfig cfg;
  cfg.scenes = 4;
  const RandomBenchResult a = randomized_route_bench(cfg, 9);
  const RandomBenchResult b = randomized_route_bench(cfg, 9);
  CHECK(a.successes == b.successes);
  REQUIRE(a.reports.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a.reports[i].completion_time == b.reports[i].completion_time);
}
