#include "scenepath/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenepath/error.hpp"

namespace scenepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

// Arc length of the closest path point to p, searched near the hint.
double project_onto(const GeometricPath& path, Vec2 p, double hint) {
  const auto& smp = path.samples;
  if (smp.size() < 2) return 0.0;
  double best_d = kInf;
  double best_s = hint;
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    if (smp[i + 1].s < hint - 1.0 || smp[i].s > hint + 3.0) continue;
    const Vec2 a = smp[i].position;
    const Vec2 b = smp[i + 1].position;
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    const double f = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d = distance(a + ab * f, p);
    if (d < best_d) {
      best_d = d;
      best_s = smp[i].s + f * (smp[i + 1].s - smp[i].s);
    }
  }
  return best_s;
}

}  // namespace

const char* to_string(CollisionKind k) {
  switch (k) {
    case CollisionKind::Static: return "static";
    case CollisionKind::Dynamic: return "dynamic";
    case CollisionKind::Ceiling: return "ceiling";
  }
  return "static";
}

TrackingTarget tracking_target(const Trajectory& traj, double t, const AgentState& state, const TrackerParams& params,
                               const GeometricPath* path, double* s_hint) {
  TrackingTarget tt;
  const double step = 1.0 / traj.rate;
  const Waypoint ref = traj.sample(t);
  const Waypoint next = traj.sample(t + step);
  const Waypoint look = traj.sample(t + params.lookahead * step);
  tt.reference = ref.position;
  tt.pursuit = look.position;
  const Vec2 d = next.position - ref.position;
  tt.speed = t >= traj.duration() ? 0.0 : d.norm() / step;
  tt.tangent = d.norm() > 1e-12 ? d.normalized() : (ref.position - state.position).normalized();
  if (path && !path->samples.empty()) {
    const double hint = s_hint ? *s_hint : ref.s;
    const double s = project_onto(*path, state.position, hint);
    if (s_hint) *s_hint = s;
    tt.head_z = path->head_z_at(s);
    const auto& wps = traj.waypoints;
    auto it = std::lower_bound(wps.begin(), wps.end(), s, [](const Waypoint& w, double v) { return w.s < v; });
    if (it == wps.end()) {
      tt.speed_limit = wps.empty() ? 0.0 : wps.back().v;
    } else if (it == wps.begin() || it->s <= s) {
      tt.speed_limit = it->v;
    } else {
      const Waypoint& a = *(it - 1);
      tt.speed_limit = a.v + (it->v - a.v) * (s - a.s) / (it->s - a.s);
    }
    const double ahead = s + params.lookahead * step * std::max(state.speed, tt.speed);
    const double len = path->length();
    if (ahead <= len) {
      tt.pursuit = path->position_at(ahead);
    } else if (path->samples.size() >= 2) {
      const Vec2 end = path->samples.back().position;
      const Vec2 dir = (end - path->position_at(len - path->spacing)).normalized();
      tt.pursuit = end + dir * (ahead - len);
    }
  } else {
    tt.head_z = ref.head_z;
  }
  return tt;
}

AgentState step(const AgentState& state, const TrackingTarget& target, const Scene& scene,
                const TrackerParams& params, double dt, Rng& rng, bool brake) {
  AgentState next = state;
  const Vec2 to_pursuit = target.pursuit - state.position;
  if (to_pursuit.norm() > 1e-9) {
    const double want = std::atan2(to_pursuit.y, to_pursuit.x);
    const double rate = std::min(params.turn_rate_max, params.lateral_accel_max / std::max(state.speed, 1e-6));
    const double turn = std::clamp(wrap_angle(want - state.heading), -rate * dt, rate * dt);
    next.heading = wrap_angle(state.heading + turn);
  }

  const double lag = (target.reference - state.position).dot(target.tangent);
  const double v_cmd =
      brake ? 0.0 : std::clamp(target.speed + params.lag_gain * lag, 0.0,
                                         std::max(target.speed_limit, 0.0) + params.catchup_margin);
  const EnvelopeParams& env = params.envelope;
  next.speed = state.speed + std::clamp(v_cmd - state.speed, env.a_min * dt, env.a_max * dt);
  next.speed = std::max(next.speed, 0.0);

  const double dz = params.max_height_rate * next.speed * dt;
  next.head_z = std::clamp(state.head_z + std::clamp(target.head_z - state.head_z, -dz, dz), kMinHeadHeight,
                           kMaxHeadHeight);
  next.speed = std::min(next.speed, envelope_vmax(next.head_z, env));

  next.position = state.position + Vec2{std::cos(next.heading), std::sin(next.heading)} * (next.speed * dt);
  const HeightMap& hm = scene.heightmap;
  if (hm.contains(next.position)) {
    const double sigma =
        params.sigma_scale * params.sigma[static_cast<std::size_t>(classify_terrain(scene, next.position))];
    if (sigma > 0.0) {
      const Vec2 lateral{-std::sin(next.heading), std::cos(next.heading)};
      next.position += lateral * (sigma * std::sqrt(dt) * rng.normal());
    }
  }
  const Box ext = hm.extent();
  next.position.x = std::clamp(next.position.x, ext.lo.x, ext.hi.x);
  next.position.y = std::clamp(next.position.y, ext.lo.y, ext.hi.y);
  next.t = state.t + dt;
  return next;
}

namespace {

struct ActivePlan {
  SegmentPlan plan;
  double t0 = 0.0;
  double s_hint = 0.0;
};

double landmark_distance(const Landmark& lm, Vec2 p, Vec2 path_end) {
  double d = distance(p, path_end);
  for (Vec2 c : lm.cells) d = std::min(d, distance(p, c));
  return d;
}

// Re-solves speed and trajectory of a segment entered at `speed` at time t.
void restart_segment(ActivePlan& a, double speed, double t, const PlannerConfig& cfg) {
  a.plan.profile = plan_speed(a.plan.path, a.plan.caps, speed, a.plan.stop, a.plan.end_bound, cfg);
  a.plan.trajectory = to_trajectory(a.plan.path, a.plan.profile, cfg.rate);
  a.t0 = t;
  a.s_hint = 0.0;
}

}  // namespace

std::optional<SegmentPlan> replan_segment(const Scene& scene, const GridGraph& graph, const SegmentPlan& current,
                                          std::vector<CollisionForecast> forecasts, const AgentState& state,
                                          const SimConfig& config) {
  const PlannerConfig& pc = config.planner;
  const Landmark& goal = scene.landmark(current.instruction.target);
  std::vector<DiskConstraint> constraints;
  try {
    for (int round = 0; round < config.max_replan_rounds; ++round) {
      for (const CollisionForecast& f : forecasts) {
        constraints.push_back(forecast_constraint(f, scene.dynamic_obstacle(f.obstacle_id), state.t, pc.forecast));
      }
      const ReplanResult rr = replan_with_forecast(graph, state.position, goal, constraints, current.coarse);
      if (rr.unavoidable) return std::nullopt;
      SegmentPlan seg = current;
      seg.coarse = rr.path;
      seg.path = smooth_and_resample(rr.path.points(graph), scene, pc.refiner, seg.instruction.locomotion, constraints);
      if (find_impassable(seg.path, scene, pc.refiner)) return std::nullopt;
      assign_head_height(seg.path, scene, pc.refiner);
      seg.caps = segment_caps(seg.path, pc);
      seg.profile = plan_speed(seg.path, seg.caps, state.speed, seg.stop, seg.end_bound, pc);
      seg.trajectory = to_trajectory(seg.path, seg.profile, pc.rate);
      forecasts = forecast_collisions(seg.path, seg.profile, scene, state.t, state.t, pc.forecast);
      if (forecasts.empty()) return seg;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

RunReport run_plan(const Scene& scene, const GridGraph& graph, const RoutePlan& plan, const SimConfig& config,
                   std::uint64_t seed) {
  RunReport report;
  report.planned_time = plan.completion_time;
  if (plan.segments.empty()) {
    report.success = true;
    return report;
  }
  Rng rng(seed);
  const PlannerConfig& pc = config.planner;
  const TrackerParams& tp = config.tracker;
  const std::size_t last = plan.segments.size() - 1;
  for (const SegmentPlan& s : plan.segments) report.segments.push_back({s.instruction.target, false, 0.0, 0});

  ActivePlan active{plan.segments.front(), 0.0, 0.0};
  std::size_t k = 0;
  bool replanned_current = false;

  AgentState state;
  const GeometricPath& first = active.plan.path;
  state.position = first.samples.front().position;
  state.head_z = first.samples.front().head_z;
  if (first.size() >= 2) {
    const Vec2 d = first.samples[1].position - first.samples[0].position;
    state.heading = std::atan2(d.y, d.x);
  }

  const double timeout = std::max(1.0, config.timeout_factor * plan.completion_time);
  double unavoidable_since = -1.0;
  double next_replan_allowed = 0.0;
  bool in_static = false;
  bool in_ceiling = false;
  std::vector<char> in_dynamic(scene.dynamic_obstacles.size(), 0);
  double sum_xy = 0.0;
  double sum_z = 0.0;
  double sum_disp = 0.0;
  double sum_adh = 0.0;
  long steps = 0;
  const bool dynamic = config.replanning && !scene.dynamic_obstacles.empty();

  while (true) {
    // Reached checks for the active segment and any earlier one still pending.
    for (std::size_t j = 0; j <= k; ++j) {
      if (report.segments[j].reached) continue;
      const SegmentPlan& sp = j == k ? active.plan : plan.segments[j];
      const Vec2 end = sp.path.samples.back().position;
      if (landmark_distance(scene.landmark(sp.instruction.target), state.position, end) <= config.goal_tolerance) {
        report.segments[j].reached = true;
        report.segments[j].arrival_time = state.t;
      }
    }
    if (k == last && report.segments[last].reached) {
      report.completion_time = state.t;
      break;
    }
    if (state.t > timeout) {
      report.failure = "timeout";
      report.completion_time = state.t;
      break;
    }

    const bool passed_end =
        report.segments[k].reached && active.s_hint >= active.plan.path.length() - config.goal_tolerance;
    if (k < last && (state.t - active.t0 >= active.plan.trajectory.duration() || passed_end)) {
      ++k;
      SegmentPlan next = plan.segments[k];
      try {
        if (replanned_current) {
          const int start = graph.nearest_live_node(state.position);
          SegmentGeometry geo = plan_geometry(scene, graph, start >= 0 ? start : graph.nearest_node(state.position),
                                              scene.landmark(next.instruction.target), next.instruction.locomotion, pc);
          next.coarse = std::move(geo.coarse);
          next.path = std::move(geo.path);
          next.caps = segment_caps(next.path, pc);
        }
        active.plan = std::move(next);
        restart_segment(active, state.speed, state.t, pc);
      } catch (const Error& e) {
        throw Error(e.kind(), "segment " + std::to_string(k), e.what());
      }
      replanned_current = false;
      continue;
    }

    bool brake = false;
    if (dynamic) {
      std::vector<CollisionForecast> fc =
          forecast_collisions(active.plan.path, active.plan.profile, scene, active.t0, state.t, pc.forecast);
      if (fc.empty()) {
        unavoidable_since = -1.0;
      } else if (state.t >= next_replan_allowed) {
        if (auto seg = replan_segment(scene, graph, active.plan, std::move(fc), state, config)) {
          active.plan = std::move(*seg);
          active.t0 = state.t;
          active.s_hint = 0.0;
          ++report.replan_count;
          ++report.segments[k].replans;
          replanned_current = true;
          unavoidable_since = -1.0;
        } else {
          if (unavoidable_since < 0.0) unavoidable_since = state.t;
          next_replan_allowed = state.t + 0.5;
        }
      }
      if (unavoidable_since >= 0.0) {
        brake = true;
        if (state.t - unavoidable_since > config.unavoidable_limit) {
          report.failure = "unavoidable";
          report.completion_time = state.t;
          break;
        }
      }
    }

    const TrackingTarget target =
        tracking_target(active.plan.trajectory, state.t - active.t0, state, tp, &active.plan.path, &active.s_hint);
    state = step(state, target, scene, tp, config.dt, rng, brake);

    const Waypoint ref = active.plan.trajectory.sample(state.t - active.t0);
    const double ground = scene.terrain_height(state.position);
    const double xy = distance(state.position, ref.position);
    const double z = std::abs(ground + state.head_z - ref.z);
    sum_xy += xy;
    sum_z += z;
    sum_disp += std::hypot(xy, z);
    sum_adh += 0.5 * (std::exp(-2.0 * xy * xy) + std::exp(-10.0 * z * z));
    ++steps;
    report.max_envelope_excess =
        std::max(report.max_envelope_excess, state.speed - envelope_vmax(state.head_z, tp.envelope));
    if (state.head_z <= kMinHeadHeight + 1e-9) report.max_crawl_speed = std::max(report.max_crawl_speed, state.speed);

    const bool hit_static = scene.static_clearance(state.position) < tp.body_radius;
    if (hit_static && !in_static) {
      report.collision_events.push_back({state.t, CollisionKind::Static, "wall", state.position});
    }
    in_static = hit_static;
    const bool hit_ceiling = state.head_z > scene.clearance_at(state.position);
    if (hit_ceiling && !in_ceiling) {
      report.collision_events.push_back({state.t, CollisionKind::Ceiling, "ceiling", state.position});
    }
    in_ceiling = hit_ceiling;
    for (std::size_t i = 0; i < scene.dynamic_obstacles.size(); ++i) {
      const DynamicObstacle& obs = scene.dynamic_obstacles[i];
      const bool hit = distance(state.position, obs.position(state.t)) < tp.body_radius + obs.radius;
      if (hit && !in_dynamic[i]) report.collision_events.push_back({state.t, CollisionKind::Dynamic, obs.id, state.position});
      in_dynamic[i] = hit;
    }

    if (config.record_trace) {
      report.trace.push_back({state.t, static_cast<int>(k), state.position, state.head_z, ground + state.head_z,
                              state.speed, ref.position, ref.z});
    }
  }

  if (steps > 0) {
    report.xy_err = sum_xy / steps;
    report.z_err = sum_z / steps;
    report.disposition_err = sum_disp / steps;
    report.adherence_score = sum_adh / steps;
  }
  const bool all_reached = std::all_of(report.segments.begin(), report.segments.end(),
                                       [](const SegmentReport& s) { return s.reached; });
  if (report.failure.empty()) {
    if (!report.collision_events.empty()) {
      report.failure = "collision";
    } else if (!all_reached) {
      report.failure = "missed-landmark";
    }
  }
  report.success = report.failure.empty();
  return report;
}

RunReport run_route(const Scene& scene, const RouteRequest& request, const SimConfig& config, std::uint64_t seed,
                    const GridGraph* graph) {
  std::optional<GridGraph> own;
  if (!graph) {
    own = build_graph(scene, config.planner.graph);
    graph = &*own;
  }
  const RoutePlan plan = plan_route(scene, *graph, request, config.planner);
  return run_plan(scene, *graph, plan, config, seed);
}

}  // namespace scenepath
