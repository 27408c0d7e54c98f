#include "scenepath/bench.hpp"

#include <algorithm>
#include <cmath>

#include "scenepath/error.hpp"

namespace scenepath {

namespace {

Landmark column_landmark(std::string name, double x, double y, double cell) {
  return {std::move(name), {{x, y - cell}, {x, y}, {x, y + cell}}};
}

}  // namespace

Scene make_slalom(const SlalomParams& p) {
  const double w = p.corridor_width;
  const double len = p.approach + (p.baffles - 1) * p.baffle_spacing + p.baffle_thickness + p.exit;
  Scene scene;
  const int cols = static_cast<int>(std::lround((len + 2.0) / p.cell_size)) + 1;
  const int rows = static_cast<int>(std::lround((w + 2.0) / p.cell_size)) + 1;
  scene.heightmap = HeightMap::flat({-1.0, -1.0}, p.cell_size, rows, cols);
  const double x_hi = -1.0 + (cols - 1) * p.cell_size;
  const double y_hi = -1.0 + (rows - 1) * p.cell_size;
  scene.static_obstacles.push_back({make_rect({-1.0, -1.0}, {x_hi, 0.0})});
  scene.static_obstacles.push_back({make_rect({-1.0, w}, {x_hi, y_hi})});
  scene.static_obstacles.push_back({make_rect({-1.0, 0.0}, {0.0, w})});
  scene.static_obstacles.push_back({make_rect({len, 0.0}, {x_hi, w})});
  for (int i = 0; i < p.baffles; ++i) {
    const double x = p.approach + i * p.baffle_spacing;
    if (i % 2 == 0) {
      scene.static_obstacles.push_back({make_rect({x, 0.0}, {x + p.baffle_thickness, w - p.gap})});
    } else {
      scene.static_obstacles.push_back({make_rect({x, p.gap}, {x + p.baffle_thickness, w})});
    }
  }
  scene.landmarks.push_back(column_landmark("start", 1.0, w / 2.0, p.cell_size));
  scene.landmarks.push_back(column_landmark("finish", len - 1.0, w / 2.0, p.cell_size));
  validate(scene);
  return scene;
}

Polygon pyramid_footprint(const PyramidParams& p) {
  const double h = (std::ceil(p.half_width / p.cell_size - 1e-9) - 1.0) * p.cell_size;
  return make_rect({-h, -h}, {h, h});
}

Scene make_pyramid(const PyramidParams& p) {
  const double extent = p.half_width + p.apron;
  const int n = static_cast<int>(std::lround(2.0 * extent / p.cell_size)) + 1;
  Scene scene;
  scene.heightmap = HeightMap::flat({-extent, -extent}, p.cell_size, n, n);
  HeightMap& hm = scene.heightmap;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Vec2 q = hm.node_position(r, c);
      hm.at(r, c) = p.peak * std::max(0.0, 1.0 - std::max(std::abs(q.x), std::abs(q.y)) / p.half_width);
    }
  }
  scene.landmarks.push_back(column_landmark("west", -extent + 1.0, 0.0, p.cell_size));
  scene.landmarks.push_back(column_landmark("east", extent - 1.0, 0.0, p.cell_size));
  validate(scene);
  return scene;
}

double length_inside(const GeometricPath& path, const Polygon& footprint) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const Vec2 a = path.samples[i].position;
    const Vec2 b = path.samples[i + 1].position;
    const Vec2 m = (a + b) * 0.5;
    if (!point_in_polygon(footprint, m)) continue;
    double edge = 1e300;
    for (std::size_t j = 0; j < footprint.size(); ++j) {
      edge = std::min(edge, distance_point_segment(m, footprint[j], footprint[(j + 1) % footprint.size()]));
    }
    if (edge > 1e-9) total += distance(a, b);
  }
  return total;
}

RouteRequest crossing_route(const Scene& scene) {
  return parse_route({"Walk to the east"}, "west", scene);
}

Scene make_crossing(std::uint64_t seed, std::uint64_t index, const CrossingParams& p) {
  Scene scene;
  const int cols = static_cast<int>(std::lround(p.length / p.cell_size)) + 1;
  const int rows = static_cast<int>(std::lround(p.width / p.cell_size)) + 1;
  scene.heightmap = HeightMap::flat({0.0, 0.0}, p.cell_size, rows, cols);
  const double mid = p.width / 2.0;
  scene.landmarks.push_back(column_landmark("west", 2.0, mid, p.cell_size));
  scene.landmarks.push_back(column_landmark("east", p.length - 2.0, mid, p.cell_size));

  const PlannerConfig planner = consistent(PlannerConfig{});
  const GridGraph graph = build_graph(scene, planner.graph);
  const RoutePlan plan = plan_route(scene, graph, crossing_route(scene), planner);
  const Trajectory& traj = plan.segments.front().trajectory;

  Rng rng = Rng::derive(seed, index);
  const double x_cross = rng.uniform(0.35 * p.length, 0.65 * p.length);
  const double speed = rng.uniform(0.5, 1.2);
  const double radius = rng.uniform(0.25, 0.45);
  const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
  double t_cross = traj.duration();
  for (const Waypoint& w : traj.waypoints) {
    if (w.position.x >= x_cross) {
      t_cross = w.t;
      break;
    }
  }
  const Vec2 meet = traj.sample(t_cross).position;
  DynamicObstacle obs;
  obs.id = "crosser";
  obs.radius = radius;
  obs.rule = LinearMotion{{meet.x, meet.y + side * speed * t_cross}, {0.0, -side * speed}};
  scene.dynamic_obstacles.push_back(obs);
  validate(scene);
  return scene;
}

SimConfig slalom_sim_defaults() {
  SimConfig sim;
  sim.planner = consistent(sim.planner);
  sim.planner.stop_at_goal = false;
  return sim;
}

void mark_pareto(std::vector<SlalomRow>& rows) {
  auto dominated = [&](const SlalomRow& r, auto metric) {
    for (const SlalomRow& o : rows) {
      if (&o == &r) continue;
      const bool no_worse = o.mean_time <= r.mean_time && metric(o) <= metric(r);
      const bool better = o.mean_time < r.mean_time || metric(o) < metric(r);
      if (no_worse && better) return true;
    }
    return false;
  };
  for (SlalomRow& r : rows) {
    r.pareto_failure = !dominated(r, [](const SlalomRow& x) { return x.failure_rate; });
    r.pareto_disposition = !dominated(r, [](const SlalomRow& x) { return x.mean_disposition; });
  }
}

namespace {

struct Batch {
  SlalomRow row;
  std::vector<TraceRow> trace;
};

Batch run_batch(const Scene& scene, const GridGraph& graph, const RouteRequest& route, SimConfig sim, int runs,
                std::uint64_t seed) {
  Batch b;
  const RoutePlan plan = plan_route(scene, graph, route, sim.planner);
  b.row.planned_time = plan.completion_time;
  double length = 0.0;
  for (const SegmentPlan& s : plan.segments) length += s.path.length();
  b.row.speed = plan.completion_time > 0.0 ? length / plan.completion_time : 0.0;
  int failures = 0;
  for (int r = 0; r < runs; ++r) {
    sim.record_trace = r == 0;
    RunReport rep = run_plan(scene, graph, plan, sim, Rng::derive(seed, static_cast<std::uint64_t>(r)).next());
    b.row.mean_time += rep.completion_time;
    b.row.mean_disposition += rep.disposition_err;
    b.row.mean_xy += rep.xy_err;
    b.row.mean_z += rep.z_err;
    failures += rep.success ? 0 : 1;
    if (r == 0) b.trace = std::move(rep.trace);
  }
  if (runs > 0) {
    b.row.mean_time /= runs;
    b.row.mean_disposition /= runs;
    b.row.mean_xy /= runs;
    b.row.mean_z /= runs;
    b.row.failure_rate = static_cast<double>(failures) / runs;
  }
  return b;
}

}  // namespace

SlalomBenchResult slalom_bench(const SlalomBenchConfig& config, std::uint64_t seed) {
  SlalomBenchResult res;
  res.scene = make_slalom(config.scene);
  SimConfig base = config.sim;
  base.tracker.sigma.fill(config.sigma);
  base.planner = consistent(base.planner);
  const GridGraph graph = build_graph(res.scene, base.planner.graph);
  const RouteRequest route = parse_route({"Run to the finish"}, "start", res.scene);

  std::vector<Batch> qp;
  for (const QpConfig& q : config.qp_configs) {
    SimConfig sim = base;
    sim.planner.envelope.a_lat_max = q.a_lat_max;
    sim.planner.envelope.a_max = q.a_max;
    Batch b = run_batch(res.scene, graph, route, sim, config.runs, seed);
    b.row.label = q.label;
    b.row.kind = "qp";
    b.row.a_lat_max = q.a_lat_max;
    b.row.a_max = q.a_max;
    res.rows.push_back(b.row);
    qp.push_back(std::move(b));
  }
  for (double v : config.constant_speeds) {
    SimConfig sim = base;
    sim.planner.constant_speed = v;
    Batch b = run_batch(res.scene, graph, route, sim, config.runs, seed);
    b.row.label = "constant-" + std::to_string(v).substr(0, 4);
    b.row.kind = "constant";
    b.row.speed = v;
    res.rows.push_back(b.row);
  }
  mark_pareto(res.rows);

  if (config.matched_config < qp.size()) {
    const QpConfig& q = config.qp_configs[config.matched_config];
    SimConfig sim = base;
    sim.planner.envelope.a_lat_max = q.a_lat_max;
    sim.planner.envelope.a_max = q.a_max;
    const RoutePlan plan = plan_route(res.scene, graph, route, sim.planner);
    res.adaptive_path = plan.segments.front().path;
    res.adaptive_profile = plan.segments.front().profile;
    res.matched_adaptive = res.rows[config.matched_config];
    res.adaptive_trace = qp[config.matched_config].trace;

    SimConfig constant = base;
    constant.planner.constant_speed = res.matched_adaptive.speed;
    Batch b = run_batch(res.scene, graph, route, constant, config.runs, seed);
    b.row.label = "matched-constant";
    b.row.kind = "constant";
    b.row.speed = res.matched_adaptive.speed;
    res.matched_constant = b.row;
    res.constant_trace = std::move(b.trace);
  }
  return res;
}

std::vector<PyramidRow> pyramid_sweep(const std::vector<double>& c_values, const PyramidParams& params) {
  const Scene scene = make_pyramid(params);
  const Polygon hill = pyramid_footprint(params);
  std::vector<PyramidRow> rows;
  for (double c : c_values) {
    PlannerConfig cfg;
    cfg.graph.c_slope = c;
    cfg = consistent(cfg);
    const GridGraph graph = build_graph(scene, cfg.graph);
    const int start = landmark_anchor(graph, scene.landmark("west"));
    const SegmentGeometry geo =
        plan_geometry(scene, graph, start, scene.landmark("east"), locomotion(Gait::Walk), cfg);
    PyramidRow row;
    row.c_slope = c;
    row.path_length = geo.path.length();
    row.inside_length = length_inside(geo.path, hill);
    row.coarse_cost = geo.coarse.cost;
    for (std::size_t i = 1; i < geo.coarse.nodes.size(); ++i) {
      row.climb += std::abs(graph.ground[geo.coarse.nodes[i]] - graph.ground[geo.coarse.nodes[i - 1]]);
    }
    rows.push_back(row);
  }
  return rows;
}

RouteRequest random_route(const Scene& scene, Rng& rng) {
  std::vector<std::size_t> order(scene.landmarks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  static constexpr const char* kVerbs[] = {"Walk", "Run", "Walk crouching", "Crawl"};
  std::vector<std::string> texts;
  for (std::size_t i = 1; i < std::min<std::size_t>(order.size(), 4); ++i) {
    texts.push_back(std::string(kVerbs[rng.below(4)]) + " to the " + scene.landmarks[order[i]].name);
  }
  return parse_route(texts, scene.landmarks[order[0]].name, scene);
}

RandomBenchResult randomized_route_bench(const RandomBenchConfig& config, std::uint64_t seed) {
  RandomBenchResult res;
  SimConfig sim = config.sim;
  sim.planner = consistent(sim.planner);
  for (int i = 0; i < config.scenes; ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
    ++res.scenes;
    RunReport rep;
    try {
      const Scene scene = randomize_scene(rng.next(), config.scene);
      const RouteRequest route = random_route(scene, rng);
      rep = run_route(scene, route, sim, rng.next());
    } catch (const Error& e) {
      rep.success = false;
      rep.failure = "planning";
    }
    if (rep.success) {
      ++res.successes;
    } else {
      ++res.failures[rep.failure];
    }
    rep.trace.clear();
    res.reports.push_back(std::move(rep));
  }
  return res;
}

}  // namespace scenepath
