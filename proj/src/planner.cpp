#include "scenepath/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scenepath/error.hpp"

namespace scenepath {

PlannerConfig consistent(PlannerConfig config) {
  config.refiner.slope_limit = config.graph.slope_limit;
  config.refiner.c_slope = config.graph.c_slope;
  config.refiner.min_top_clearance = config.graph.min_crawl_clearance;
  config.forecast.agent_radius = config.graph.agent_radius;
  return config;
}

int landmark_anchor(const GridGraph& graph, const Landmark& landmark) {
  Vec2 centroid{};
  for (Vec2 p : landmark.cells) centroid += p;
  centroid = centroid / static_cast<double>(std::max<std::size_t>(1, landmark.cells.size()));
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int n : landmark_nodes(graph, landmark)) {
    if (graph.degree(n) == 0) continue;
    const double d = distance(graph.position(n), centroid);
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best >= 0 ? best : graph.nearest_node(centroid);
}

SegmentGeometry plan_geometry(const Scene& scene, const GridGraph& graph, int start_node, const Landmark& goal,
                              const LocomotionType& locomotion, const PlannerConfig& config,
                              const std::vector<DiskConstraint>& disks) {
  std::optional<GridGraph> patched;
  const std::vector<int> goals = landmark_nodes(graph, goal);
  for (int attempt = 0; attempt <= config.max_top_retries; ++attempt) {
    const GridGraph& g = patched ? *patched : graph;
    SegmentGeometry geo;
    geo.coarse = astar(g, start_node, goals, goal.name);
    geo.path = smooth_and_resample(geo.coarse.points(g), scene, config.refiner, locomotion, disks);
    const std::optional<Vec2> spot = find_impassable(geo.path, scene, config.refiner);
    if (!spot) {
      assign_head_height(geo.path, scene, config.refiner);
      return geo;
    }
    if (!patched) patched = graph;
    *patched = block_constraints(*patched, {{*spot, *spot, config.graph.agent_radius + g.cell_size}});
  }
  throw Error(ErrorKind::RetryExhausted, "plan_geometry",
              "path to '" + goal.name + "' keeps passing under an impassable ceiling");
}

std::vector<double> segment_caps(const GeometricPath& path, const PlannerConfig& config) {
  if (config.constant_speed) return std::vector<double>(path.size(), *config.constant_speed);
  return point_speed_caps(path, config.envelope, path.locomotion, config.caps);
}

namespace {

SpeedProblem make_problem(const GeometricPath& path, std::vector<double> caps, double v_start, bool stop,
                          double end_bound, const PlannerConfig& config) {
  std::optional<double> v_end;
  if (stop) {
    v_end = 0.0;
  } else {
    caps.back() = std::min(caps.back(), end_bound);
  }
  return SpeedProblem::from_path(path, std::move(caps), config.envelope, v_start, v_end);
}

}  // namespace

double entry_speed_bound(const GeometricPath& path, const std::vector<double>& caps, bool stop, double end_bound,
                         const PlannerConfig& config) {
  if (config.constant_speed) return *config.constant_speed;
  if (path.size() < 2) return std::min(caps.empty() ? 0.0 : caps.front(), end_bound);
  return max_feasible_start_speed(make_problem(path, caps, 0.0, stop, end_bound, config));
}

SpeedProfile plan_speed(const GeometricPath& path, const std::vector<double>& caps, double v_start, bool stop,
                        double end_bound, const PlannerConfig& config) {
  if (config.constant_speed) return constant_speed_profile(path, *config.constant_speed);
  if (path.size() < 2) {
    SpeedProfile p;
    for (const PathSample& smp : path.samples) p.s.push_back(smp.s);
    p.beta.assign(p.s.size(), 0.0);
    finalize_profile(p);
    return p;
  }
  SpeedProblem problem = make_problem(path, caps, 0.0, stop, end_bound, config);
  problem.v_start = std::min(v_start, max_feasible_start_speed(problem));
  return solve_min_time_qp(problem);
}

RoutePlan plan_route(const Scene& scene, const GridGraph& graph, const RouteRequest& request,
                     const PlannerConfig& config) {
  RoutePlan plan;
  const std::size_t n = request.instructions.size();
  if (n == 0) return plan;
  int node = landmark_anchor(graph, scene.landmark(request.instructions.front().source));
  for (std::size_t k = 0; k < n; ++k) {
    const Instruction& instr = request.instructions[k];
    SegmentPlan seg;
    seg.instruction = instr;
    try {
      SegmentGeometry geo = plan_geometry(scene, graph, node, scene.landmark(instr.target), instr.locomotion, config);
      seg.coarse = std::move(geo.coarse);
      seg.path = std::move(geo.path);
    } catch (const Error& e) {
      throw Error(e.kind(), "segment " + std::to_string(k), e.what());
    }
    node = seg.coarse.nodes.back();
    plan.segments.push_back(std::move(seg));
  }

  // Each segment ends low enough for the next one's starting head height.
  for (std::size_t k = n - 1; k-- > 0;) {
    GeometricPath& a = plan.segments[k].path;
    const GeometricPath& b = plan.segments[k + 1].path;
    if (a.samples.empty() || b.samples.empty()) continue;
    const double h_next = b.samples.front().head_z;
    for (PathSample& smp : a.samples) {
      smp.head_z = std::min(smp.head_z, h_next + config.refiner.max_height_rate * (a.length() - smp.s));
    }
  }
  for (SegmentPlan& seg : plan.segments) seg.caps = segment_caps(seg.path, config);

  // The turn where two segments meet caps the junction speed like any other sample.
  for (std::size_t k = 0; k + 1 < n && !config.constant_speed; ++k) {
    const GeometricPath& a = plan.segments[k].path;
    SegmentPlan& b = plan.segments[k + 1];
    if (a.size() < 2 || b.path.size() < 2) continue;
    const Vec2 in = b.path.samples[0].position - a.samples[a.size() - 2].position;
    const Vec2 out = b.path.samples[1].position - b.path.samples[0].position;
    const double legs = 0.5 * (in.norm() + out.norm());
    if (legs <= 0.0 || in.norm() <= 0.0 || out.norm() <= 0.0) continue;
    const double turn = std::acos(std::clamp(in.dot(out) / (in.norm() * out.norm()), -1.0, 1.0));
    const double kappa = 2.0 * std::sin(0.5 * turn) / legs;
    if (kappa > 0.0) b.caps.front() = std::min(b.caps.front(), std::sqrt(config.envelope.a_lat_max / kappa));
  }

  // Entry-speed bounds propagate backwards so every junction speed can be
  // carried into the next segment.
  std::vector<double> end_bound(n, std::numeric_limits<double>::infinity());
  std::vector<bool> stop(n, config.stop_at_landmarks);
  stop[n - 1] = config.stop_at_goal;
  for (std::size_t k = n - 1; k-- > 0;) {
    const SegmentPlan& next = plan.segments[k + 1];
    end_bound[k] = entry_speed_bound(next.path, next.caps, stop[k + 1], end_bound[k + 1], config);
  }
  double v = 0.0;
  double t = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    SegmentPlan& seg = plan.segments[k];
    seg.stop = stop[k];
    seg.end_bound = end_bound[k];
    try {
      seg.profile = plan_speed(seg.path, seg.caps, v, stop[k], end_bound[k], config);
      seg.trajectory = to_trajectory(seg.path, seg.profile, config.rate);
    } catch (const Error& e) {
      throw Error(e.kind(), "segment " + std::to_string(k), e.what());
    }
    v = seg.profile.v.empty() ? 0.0 : seg.profile.v.back();
    t += seg.profile.completion_time;
  }
  plan.completion_time = t;
  return plan;
}

}  // namespace scenepath
