#include "scenepath/refiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "scenepath/error.hpp"

namespace scenepath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lowest clearance of any top obstacle the segment touches.
double segment_clearance(const Scene& scene, Vec2 a, Vec2 b) {
  double c = kInf;
  for (const TopObstacle& t : scene.top_obstacles) {
    if (t.clearance_height < c && distance_segment_polygon(t.footprint, a, b) <= 1e-12) c = t.clearance_height;
  }
  return c;
}

// Clearance governing sample i: its own and that of both adjacent segments.
double sample_clearance(const Scene& scene, const GeometricPath& path, std::size_t i) {
  const auto& smp = path.samples;
  double c = scene.clearance_at(smp[i].position);
  if (i > 0) c = std::min(c, segment_clearance(scene, smp[i - 1].position, smp[i].position));
  if (i + 1 < smp.size()) c = std::min(c, segment_clearance(scene, smp[i].position, smp[i + 1].position));
  return c;
}

struct TerrainCost {
  double cost = 0.0;
  double max_slope = 0.0;
};

// Validity and cost of candidate segments against everything the coarse
// path was already guaranteed to respect.
class SegmentChecker {
 public:
  SegmentChecker(const Scene& scene, const RefinerParams& params, const std::vector<DiskConstraint>& disks)
      : scene_(scene), params_(params), disks_(disks) {
    for (const StaticObstacle& o : scene.static_obstacles) boxes_.push_back(bounding_box(o.footprint));
  }

  bool static_ok(Vec2 a, Vec2 b) const {
    const Box seg{{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      if (!boxes_[i].overlaps(seg, params_.clearance_margin)) continue;
      if (distance_segment_polygon(scene_.static_obstacles[i].footprint, a, b) < params_.clearance_margin - 1e-9) {
        return false;
      }
    }
    return true;
  }

  bool disks_ok(Vec2 a, Vec2 b) const {
    for (const DiskConstraint& d : disks_) {
      if (distance_segment_segment(a, b, d.a, d.b) < d.radius) return false;
    }
    return true;
  }

  bool top_ok(Vec2 a, Vec2 b) const {
    return segment_clearance(scene_, a, b) >= params_.min_top_clearance;
  }

  // Sampled at every grid-line crossing and twice inside each cell, so a
  // segment clipping a cell corner still sees that cell's height.
  TerrainCost terrain(Vec2 a, Vec2 b) const {
    TerrainCost tc;
    const double len = distance(a, b);
    if (len <= 0.0) return tc;
    const HeightMap& hm = scene_.heightmap;
    std::vector<double> cuts{0.0, 1.0};
    auto crossings = [&](double p0, double p1, double o) {
      if (std::abs(p1 - p0) < 1e-12) return;
      const double lo = std::min(p0, p1), hi = std::max(p0, p1);
      for (double k = std::ceil((lo - o) / hm.cell_size); o + k * hm.cell_size < hi; k += 1.0) {
        const double u = (o + k * hm.cell_size - p0) / (p1 - p0);
        if (u > 0.0 && u < 1.0) cuts.push_back(u);
      }
    };
    crossings(a.x, b.x, hm.origin.x);
    crossings(a.y, b.y, hm.origin.y);
    std::sort(cuts.begin(), cuts.end());
    Vec2 prev_p = a;
    double prev = scene_.terrain_height(a);
    auto advance = [&](double u) {
      const Vec2 q = a + (b - a) * u;
      const double step = distance(prev_p, q);
      if (step < 1e-12) return;
      const double h = scene_.terrain_height(q);
      const double slope = std::abs(h - prev) / step;
      tc.cost += std::hypot(step, h - prev) * std::exp(params_.c_slope * slope);
      tc.max_slope = std::max(tc.max_slope, slope);
      prev_p = q;
      prev = h;
    };
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      advance(0.5 * (cuts[k - 1] + cuts[k]));
      advance(cuts[k]);
    }
    return tc;
  }

  TerrainCost terrain(const std::vector<Vec2>& pts, std::size_t i, std::size_t j) const {
    TerrainCost tc;
    for (std::size_t k = i; k < j; ++k) {
      const TerrainCost t = terrain(pts[k], pts[k + 1]);
      tc.cost += t.cost;
      tc.max_slope = std::max(tc.max_slope, t.max_slope);
    }
    return tc;
  }

  bool inside(Vec2 p) const { return scene_.heightmap.contains(p); }

  bool segment_ok(Vec2 a, Vec2 b) const {
    return inside(a) && inside(b) && static_ok(a, b) && disks_ok(a, b) && top_ok(a, b) &&
           terrain(a, b).max_slope <= params_.slope_limit + 1e-9;
  }

  // A replacement chain must not cost more than what it replaces, and with a
  // slope penalty it must not climb anything steeper either.
  bool no_worse(const TerrainCost& candidate, const TerrainCost& original) const {
    if (candidate.cost > original.cost + 1e-9) return false;
    if (params_.c_slope > 0.0 && candidate.max_slope > original.max_slope + 1e-9) return false;
    return true;
  }

 private:
  const Scene& scene_;
  const RefinerParams& params_;
  const std::vector<DiskConstraint>& disks_;
  std::vector<Box> boxes_;
};

std::vector<Vec2> drop_collinear(const std::vector<Vec2>& pts) {
  std::vector<Vec2> out;
  for (Vec2 p : pts) {
    if (!out.empty() && distance(out.back(), p) < 1e-12) continue;
    while (out.size() >= 2) {
      const Vec2 a = out[out.size() - 2];
      const Vec2 b = out.back();
      const Vec2 u = b - a;
      const Vec2 v = p - b;
      if (std::abs(u.cross(v)) <= 1e-12 * u.norm() * v.norm() && u.dot(v) > 0.0) {
        out.pop_back();
      } else {
        break;
      }
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Vec2> string_pull(const std::vector<Vec2>& pts, const SegmentChecker& check) {
  std::vector<Vec2> out{pts.front()};
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t next = i + 1;
    for (std::size_t j = pts.size() - 1; j > i + 1; --j) {
      if (!check.segment_ok(pts[i], pts[j])) continue;
      if (!check.no_worse(check.terrain(pts[i], pts[j]), check.terrain(pts, i, j))) continue;
      next = j;
      break;
    }
    out.push_back(pts[next]);
    i = next;
  }
  return out;
}

Vec2 clearance_gradient(const Scene& scene, Vec2 p) {
  constexpr double eps = 1e-4;
  const double gx = scene.static_clearance(p + Vec2{eps, 0}) - scene.static_clearance(p - Vec2{eps, 0});
  const double gy = scene.static_clearance(p + Vec2{0, eps}) - scene.static_clearance(p - Vec2{0, eps});
  return Vec2{gx, gy}.normalized();
}

void push_vertices(std::vector<Vec2>& pts, const Scene& scene, const RefinerParams& params,
                   const SegmentChecker& check) {
  if (scene.static_obstacles.empty()) return;
  const double want = params.clearance_margin + params.push_buffer;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 original = pts[i];
    Vec2 p = original;
    for (int it = 0; it < 4; ++it) {
      const double c = scene.static_clearance(p);
      if (c >= want - 1e-9) break;
      const Vec2 dir = clearance_gradient(scene, p);
      if (dir.norm() == 0.0) break;
      p += dir * (want - c);
    }
    if (p == original) continue;
    const TerrainCost before = check.terrain(pts, i - 1, i + 1);
    TerrainCost after = check.terrain(pts[i - 1], p);
    const TerrainCost t2 = check.terrain(p, pts[i + 1]);
    after.cost += t2.cost;
    after.max_slope = std::max(after.max_slope, t2.max_slope);
    const bool slope_ok = params.c_slope <= 0.0 || after.max_slope <= before.max_slope + 1e-9;
    if (slope_ok && check.segment_ok(pts[i - 1], p) && check.segment_ok(p, pts[i + 1])) pts[i] = p;
  }
}

std::vector<Vec2> cut_corners(const std::vector<Vec2>& pts, const SegmentChecker& check) {
  static constexpr double kFractions[] = {0.25, 0.125, 0.0625};
  std::vector<Vec2> out{pts.front()};
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 p = pts[i];
    if (std::abs(turning_angle(pts[i - 1], p, pts[i + 1])) < 1e-9) continue;
    bool cut = false;
    for (double f : kFractions) {
      const Vec2 q = p + (pts[i - 1] - p) * f;
      const Vec2 r = p + (pts[i + 1] - p) * f;
      if (!check.segment_ok(q, r)) continue;
      TerrainCost before = check.terrain(q, p);
      const TerrainCost b2 = check.terrain(p, r);
      before.cost += b2.cost;
      before.max_slope = std::max(before.max_slope, b2.max_slope);
      if (!check.no_worse(check.terrain(q, r), before)) continue;
      out.push_back(q);
      out.push_back(r);
      cut = true;
      break;
    }
    if (!cut) out.push_back(p);
  }
  out.push_back(pts.back());
  return out;
}

GeometricPath build_path(const std::vector<Vec2>& poly, const Scene& scene, const RefinerParams& params,
                         const LocomotionType& locomotion) {
  GeometricPath path;
  path.spacing = params.spacing;
  path.locomotion = locomotion;
  const std::vector<Vec2> pts = resample_polyline(poly, params.spacing);
  const double total = polyline_length(poly);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PathSample smp;
    smp.position = pts[i];
    smp.s = (i + 1 == pts.size() && i > 0) ? total : static_cast<double>(i) * params.spacing;
    smp.ground_z = scene.terrain_height(pts[i]);
    smp.head_z = locomotion.head_height;
    path.samples.push_back(smp);
  }
  compute_curvature(path);
  return path;
}

bool path_respects(const GeometricPath& path, const Scene& scene, const RefinerParams& params,
                   const std::vector<DiskConstraint>& disks) {
  for (const PathSample& smp : path.samples) {
    if (scene.static_clearance(smp.position) < params.clearance_margin - 1e-9) return false;
    for (const DiskConstraint& d : disks) {
      if (d.distance_to(smp.position) < d.radius) return false;
    }
  }
  return true;
}

}  // namespace

double corridor_width(const std::vector<Vec2>& pts, const Scene& scene, double max_range) {
  if (pts.size() < 2 || scene.static_obstacles.empty()) return kInf;
  double narrowest = kInf;
  auto probe = [&](Vec2 origin, Vec2 dir) {
    const Vec2 n = dir.normalized().perp();
    double left = max_range;
    double right = max_range;
    for (const StaticObstacle& o : scene.static_obstacles) {
      left = std::min(left, ray_cast_polygon(o.footprint, origin, n));
      right = std::min(right, ray_cast_polygon(o.footprint, origin, n * -1.0));
    }
    narrowest = std::min(narrowest, left + right);
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 dir = pts[i + 1] - pts[i];
    if (dir.norm() == 0.0) continue;
    probe(pts[i], dir);
    probe((pts[i] + pts[i + 1]) * 0.5, dir);
  }
  return narrowest;
}

GeometricPath smooth_and_resample(const std::vector<Vec2>& coarse, const Scene& scene, const RefinerParams& params,
                                  const LocomotionType& locomotion, const std::vector<DiskConstraint>& disks) {
  if (coarse.empty()) throw Error(ErrorKind::Validation, "smooth_and_resample", "empty coarse path");
  GeometricPath plain = build_path(coarse, scene, params, locomotion);
  if (!params.smoothing || coarse.size() < 3) return plain;
  if (corridor_width(coarse, scene) <= 2.0 * params.clearance_margin + 1e-6) {
    plain.degraded = true;
    return plain;
  }

  const SegmentChecker check(scene, params, disks);
  std::vector<Vec2> poly = drop_collinear(coarse);
  poly = string_pull(poly, check);
  push_vertices(poly, scene, params, check);
  for (int it = 0; it < params.cut_iterations; ++it) poly = drop_collinear(cut_corners(poly, check));

  GeometricPath smooth = build_path(poly, scene, params, locomotion);
  const bool ok = total_turning(smooth.positions()) <= total_turning(coarse) + 1e-6 &&
                  smooth.length() <= 1.05 * polyline_length(coarse) + 1e-9 &&
                  path_respects(smooth, scene, params, disks);
  if (!ok) {
    plain.degraded = true;
    return plain;
  }
  return smooth;
}

std::optional<Vec2> find_impassable(const GeometricPath& path, const Scene& scene, const RefinerParams& params) {
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    if (sample_clearance(scene, path, i) - params.head_margin < kMinHeadHeight - 1e-12) return path.samples[i].position;
  }
  return std::nullopt;
}

void assign_head_height(GeometricPath& path, const Scene& scene, const RefinerParams& params) {
  const double standing = std::clamp(path.locomotion.head_height, kMinHeadHeight, kMaxHeadHeight);
  struct Dip {
    double s;
    double target;
    double slope;
  };
  std::vector<Dip> dips;
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const PathSample& smp = path.samples[i];
    const double clearance = sample_clearance(scene, path, i);
    const double room = clearance - params.head_margin;
    if (room < kMinHeadHeight - 1e-12) {
      throw Error(ErrorKind::ImpassableTop, fmt::format("head height at ({:.3f}, {:.3f})", smp.position.x, smp.position.y),
                  fmt::format("clearance {:.3f} m leaves {:.3f} m, below the 0.4 m crawl height", clearance, room));
    }
    if (room < standing) {
      const double slope = std::min(params.max_height_rate, (standing - room) / params.lead_distance);
      dips.push_back({smp.s, room, slope});
    }
  }
  for (PathSample& smp : path.samples) {
    double h = standing;
    for (const Dip& d : dips) {
      h = std::min(h, d.target + d.slope * std::max(0.0, std::abs(smp.s - d.s) - params.dip_hold));
    }
    smp.head_z = std::clamp(h, kMinHeadHeight, kMaxHeadHeight);
  }
}

Vec2 predict_obstacle(const DynamicObstacle& obs, double t_now, double t, PredictionMode mode) {
  if (mode == PredictionMode::Exact) return obs.position(t);
  return obs.position(t_now) + obs.velocity(t_now) * (t - t_now);
}

std::vector<CollisionForecast> forecast_collisions(const GeometricPath& path, const SpeedProfile& profile,
                                                   const Scene& scene, double path_t0, double t_now,
                                                   const ForecastParams& params) {
  std::vector<CollisionForecast> out;
  if (path.samples.empty()) return out;
  auto agent_at = [&](double t) {
    return path.position_at(profile.t.empty() ? 0.0 : arc_length_at(profile, t - path_t0));
  };
  const int steps = static_cast<int>(std::ceil(params.horizon / params.dt - 1e-9));
  for (const DynamicObstacle& obs : scene.dynamic_obstacles) {
    const double reach = params.agent_radius + obs.radius + params.safety_margin;
    auto gap = [&](double t) {
      return distance(agent_at(t), predict_obstacle(obs, t_now, t, params.mode)) - reach;
    };
    double prev_t = t_now;
    for (int k = 0; k <= steps; ++k) {
      const double t = std::min(t_now + k * params.dt, t_now + params.horizon);
      if (gap(t) >= 0.0) {
        prev_t = t;
        continue;
      }
      double lo = prev_t;
      double hi = t;
      if (k > 0) {
        for (int it = 0; it < 50; ++it) {
          const double mid = 0.5 * (lo + hi);
          (gap(mid) < 0.0 ? hi : lo) = mid;
        }
      }
      const double tc = k == 0 ? t_now : hi;
      CollisionForecast f;
      f.obstacle_id = obs.id;
      f.time_to_collision = tc - t_now;
      f.obstacle_position = predict_obstacle(obs, t_now, tc, params.mode);
      f.obstacle_velocity = params.mode == PredictionMode::Exact ? obs.velocity(tc) : obs.velocity(t_now);
      f.s = profile.t.empty() ? 0.0 : arc_length_at(profile, tc - path_t0);
      out.push_back(f);
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const CollisionForecast& a, const CollisionForecast& b) {
    return a.time_to_collision < b.time_to_collision;
  });
  return out;
}

DiskConstraint forecast_constraint(const CollisionForecast& f, const DynamicObstacle& obs, double t_now,
                                   const ForecastParams& params) {
  const double tc = t_now + f.time_to_collision;
  DiskConstraint d;
  d.a = predict_obstacle(obs, t_now, t_now, params.mode);
  d.b = predict_obstacle(obs, t_now, tc + params.sweep_time, params.mode);
  d.radius = obs.radius + params.agent_radius + params.safety_margin;
  return d;
}

GridGraph block_constraints(const GridGraph& graph, const std::vector<DiskConstraint>& constraints) {
  GridGraph g = graph;
  for (const DiskConstraint& dc : constraints) {
    const double reach = dc.radius + 2.0 * g.cell_size;
    const int c_lo = std::max(0, static_cast<int>(std::floor((std::min(dc.a.x, dc.b.x) - reach - g.origin.x) / g.cell_size)));
    const int c_hi = std::min(g.cols - 1, static_cast<int>(std::ceil((std::max(dc.a.x, dc.b.x) + reach - g.origin.x) / g.cell_size)));
    const int r_lo = std::max(0, static_cast<int>(std::floor((std::min(dc.a.y, dc.b.y) - reach - g.origin.y) / g.cell_size)));
    const int r_hi = std::min(g.rows - 1, static_cast<int>(std::ceil((std::max(dc.a.y, dc.b.y) + reach - g.origin.y) / g.cell_size)));
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        const int n = g.node(r, c);
        for (int d = 0; d < 8; ++d) {
          if (!g.retained(n, d)) continue;
          const int m = g.neighbor(n, d);
          if (distance_segment_segment(g.position(n), g.position(m), dc.a, dc.b) < dc.radius) {
            g.remove_edge(n, d, EdgeStatus::Blocked);
          }
        }
      }
    }
  }
  return g;
}

ReplanResult replan_with_forecast(const GridGraph& graph, Vec2 start, const Landmark& goal,
                                  const std::vector<DiskConstraint>& constraints, const CoarsePath& previous) {
  const GridGraph g = block_constraints(graph, constraints);
  ReplanResult res;
  const int s = g.nearest_live_node(start);
  if (s < 0) {
    res.path = previous;
    res.unavoidable = true;
    return res;
  }
  try {
    res.path = astar(g, s, landmark_nodes(g, goal), goal.name);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unreachable) throw;
    res.path = previous;
    res.unavoidable = true;
  }
  return res;
}

}  // namespace scenepath
