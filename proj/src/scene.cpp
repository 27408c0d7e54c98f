#include "scenepath/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "scenepath/error.hpp"

namespace scenepath {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::OutOfExtent: return "out_of_extent";
    case ErrorKind::UnknownId: return "unknown_id";
    case ErrorKind::UnknownVerb: return "unknown_verb";
    case ErrorKind::UnknownLandmark: return "unknown_landmark";
    case ErrorKind::MissingSource: return "missing_source";
    case ErrorKind::ChainBreak: return "chain_break";
    case ErrorKind::DegenerateGraph: return "degenerate_graph";
    case ErrorKind::Unreachable: return "unreachable";
    case ErrorKind::ImpassableTop: return "impassable_top";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Stuck: return "stuck";
    case ErrorKind::RetryExhausted: return "retry_exhausted";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

// Reflect a 1-D walk into [lo, hi].
double reflect(double start, double v, double lo, double hi, double t) {
  const double span = hi - lo;
  if (span <= 0.0) return lo;
  const double period = 2.0 * span;
  double m = std::fmod(start - lo + v * t, period);
  if (m < 0.0) m += period;
  return lo + (m <= span ? m : period - m);
}

double reflect_velocity(double start, double v, double lo, double hi, double t) {
  const double span = hi - lo;
  if (span <= 0.0) return 0.0;
  const double period = 2.0 * span;
  double m = std::fmod(start - lo + v * t, period);
  if (m < 0.0) m += period;
  return m <= span ? v : -v;
}

double loop_length(const WaypointLoopMotion& m) {
  double len = 0.0;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    len += distance(m.points[i], m.points[(i + 1) % m.points.size()]);
  }
  return len;
}

// Returns leg index and fraction along it for arc position s on the loop.
std::pair<std::size_t, double> loop_locate(const WaypointLoopMotion& m, double t) {
  const double total = loop_length(m);
  if (total <= 0.0 || m.speed <= 0.0) return {0, 0.0};
  double s = std::fmod(m.speed * t, total);
  if (s < 0.0) s += total;
  const std::size_t n = m.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double leg = distance(m.points[i], m.points[(i + 1) % n]);
    if (s <= leg && leg > 0.0) return {i, s / leg};
    s -= leg;
  }
  return {n - 1, 1.0};
}

}  // namespace

Vec2 position_at(const MotionRule& rule, double t) {
  return std::visit(
      [t](const auto& m) -> Vec2 {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearMotion>) {
          return m.start + m.velocity * t;
        } else if constexpr (std::is_same_v<T, WaypointLoopMotion>) {
          if (m.points.size() == 1) return m.points.front();
          const auto [leg, frac] = loop_locate(m, t);
          const Vec2 a = m.points[leg];
          const Vec2 b = m.points[(leg + 1) % m.points.size()];
          return a + (b - a) * frac;
        } else {
          return {reflect(m.start.x, m.velocity.x, m.bounds_min.x, m.bounds_max.x, t),
                  reflect(m.start.y, m.velocity.y, m.bounds_min.y, m.bounds_max.y, t)};
        }
      },
      rule);
}

Vec2 velocity_at(const MotionRule& rule, double t) {
  return std::visit(
      [t](const auto& m) -> Vec2 {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearMotion>) {
          return m.velocity;
        } else if constexpr (std::is_same_v<T, WaypointLoopMotion>) {
          if (m.points.size() == 1 || loop_length(m) <= 0.0) return {};
          const auto [leg, frac] = loop_locate(m, t);
          const Vec2 a = m.points[leg];
          const Vec2 b = m.points[(leg + 1) % m.points.size()];
          return (b - a).normalized() * m.speed;
        } else {
          return {reflect_velocity(m.start.x, m.velocity.x, m.bounds_min.x, m.bounds_max.x, t),
                  reflect_velocity(m.start.y, m.velocity.y, m.bounds_min.y, m.bounds_max.y, t)};
        }
      },
      rule);
}

double Scene::terrain_height(Vec2 p) const {
  const HeightMap& hm = heightmap;
  if (!hm.contains(p)) {
    throw Error(ErrorKind::OutOfExtent, "terrain_height",
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside heightmap extent");
  }
  const double fx = std::clamp((p.x - hm.origin.x) / hm.cell_size, 0.0, static_cast<double>(hm.cols - 1));
  const double fy = std::clamp((p.y - hm.origin.y) / hm.cell_size, 0.0, static_cast<double>(hm.rows - 1));
  const int c0 = std::min(static_cast<int>(std::floor(fx)), std::max(hm.cols - 2, 0));
  const int r0 = std::min(static_cast<int>(std::floor(fy)), std::max(hm.rows - 2, 0));
  const int c1 = std::min(c0 + 1, hm.cols - 1);
  const int r1 = std::min(r0 + 1, hm.rows - 1);
  const double tx = fx - c0;
  const double ty = fy - r0;
  const double h00 = hm.at(r0, c0);
  const double h01 = hm.at(r0, c1);
  const double h10 = hm.at(r1, c0);
  const double h11 = hm.at(r1, c1);
  return (1 - ty) * ((1 - tx) * h00 + tx * h01) + ty * ((1 - tx) * h10 + tx * h11);
}

double Scene::clearance_at(Vec2 p) const {
  if (!heightmap.contains(p)) {
    throw Error(ErrorKind::OutOfExtent, "clearance_at", "point outside heightmap extent");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const TopObstacle& top : top_obstacles) {
    if (top.clearance_height < best && point_in_polygon(top.footprint, p)) best = top.clearance_height;
  }
  return best;
}

double Scene::static_clearance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const StaticObstacle& o : static_obstacles) best = std::min(best, distance_to_polygon(o.footprint, p));
  return best;
}

Vec2 Scene::obstacle_position(std::string_view id, double t) const { return dynamic_obstacle(id).position(t); }

const Landmark* Scene::find_landmark(std::string_view name) const {
  for (const Landmark& l : landmarks) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

const Landmark& Scene::landmark(std::string_view name) const {
  if (const Landmark* l = find_landmark(name)) return *l;
  throw Error(ErrorKind::UnknownLandmark, "scene", "unknown landmark '" + std::string(name) + "'");
}

const DynamicObstacle& Scene::dynamic_obstacle(std::string_view id) const {
  for (const DynamicObstacle& o : dynamic_obstacles) {
    if (o.id == id) return o;
  }
  throw Error(ErrorKind::UnknownId, "scene", "unknown dynamic obstacle '" + std::string(id) + "'");
}

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::Validation, where, msg);
}

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void validate_polygon(const Polygon& poly, const std::string& where) {
  for (const Vec2& p : poly) {
    if (!finite(p)) invalid(where, "non-finite vertex");
  }
  if (poly.size() < 3) invalid(where, "polygon needs at least 3 vertices");
  if (!polygon_is_simple(poly)) invalid(where, "polygon is not simple");
}

}  // namespace

void validate(const Scene& scene) {
  const HeightMap& hm = scene.heightmap;
  if (!(hm.cell_size > 0.0) || !std::isfinite(hm.cell_size)) invalid("/heightmap/cell_size", "must be > 0");
  if (hm.rows <= 0 || hm.cols <= 0) invalid("/heightmap", "rows and cols must be positive");
  if (hm.heights.size() != static_cast<std::size_t>(hm.rows) * hm.cols) {
    invalid("/heightmap/heights", "expected rows*cols = " + std::to_string(hm.rows * hm.cols) + " samples, got " +
                                      std::to_string(hm.heights.size()));
  }
  if (!finite(hm.origin)) invalid("/heightmap/origin", "non-finite origin");
  for (std::size_t i = 0; i < hm.heights.size(); ++i) {
    if (!std::isfinite(hm.heights[i])) invalid("/heightmap/heights/" + std::to_string(i), "non-finite height");
  }
  for (std::size_t i = 0; i < scene.static_obstacles.size(); ++i) {
    validate_polygon(scene.static_obstacles[i].footprint, "/static_obstacles/" + std::to_string(i) + "/polygon");
  }
  for (std::size_t i = 0; i < scene.top_obstacles.size(); ++i) {
    const std::string where = "/top_obstacles/" + std::to_string(i);
    validate_polygon(scene.top_obstacles[i].footprint, where + "/polygon");
    const double c = scene.top_obstacles[i].clearance_height;
    if (!(c > 0.0) || !std::isfinite(c)) invalid(where + "/clearance_height", "must be > 0");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < scene.dynamic_obstacles.size(); ++i) {
    const DynamicObstacle& o = scene.dynamic_obstacles[i];
    const std::string where = "/dynamic_obstacles/" + std::to_string(i);
    if (!ids.insert(o.id).second) invalid(where + "/id", "duplicate dynamic obstacle id '" + o.id + "'");
    if (!(o.radius > 0.0) || !std::isfinite(o.radius)) invalid(where + "/radius", "must be > 0");
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LinearMotion>) {
            if (!finite(m.start) || !finite(m.velocity)) invalid(where + "/rule", "non-finite linear rule");
          } else if constexpr (std::is_same_v<T, WaypointLoopMotion>) {
            if (m.points.empty()) invalid(where + "/rule/points", "waypoint loop needs at least one point");
            for (const Vec2& p : m.points) {
              if (!finite(p)) invalid(where + "/rule/points", "non-finite point");
            }
            if (!(m.speed >= 0.0) || !std::isfinite(m.speed)) invalid(where + "/rule/speed", "must be >= 0");
          } else {
            if (!finite(m.start) || !finite(m.velocity) || !finite(m.bounds_min) || !finite(m.bounds_max)) {
              invalid(where + "/rule", "non-finite bounce rule");
            }
            if (m.bounds_min.x > m.bounds_max.x || m.bounds_min.y > m.bounds_max.y) {
              invalid(where + "/rule/bounds", "min exceeds max");
            }
            if (!Box{m.bounds_min, m.bounds_max}.contains(m.start, 1e-12)) {
              invalid(where + "/rule/start", "start outside bounds");
            }
          }
        },
        o.rule);
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < scene.landmarks.size(); ++i) {
    const Landmark& l = scene.landmarks[i];
    const std::string where = "/landmarks/" + std::to_string(i);
    if (l.name.empty()) invalid(where + "/name", "empty landmark name");
    if (!names.insert(l.name).second) invalid(where + "/name", "duplicate landmark name '" + l.name + "'");
    if (l.cells.empty()) invalid(where + "/cells", "landmark '" + l.name + "' has no cells");
    for (std::size_t k = 0; k < l.cells.size(); ++k) {
      const Vec2 p = l.cells[k];
      const std::string cw = where + "/cells/" + std::to_string(k);
      if (!finite(p) || !hm.contains(p)) invalid(cw, "landmark '" + l.name + "' cell outside heightmap extent");
      for (std::size_t j = 0; j < scene.static_obstacles.size(); ++j) {
        if (point_in_polygon(scene.static_obstacles[j].footprint, p)) {
          invalid(cw, "landmark '" + l.name + "' cell inside static obstacle " + std::to_string(j));
        }
      }
    }
  }
}

const char* to_string(TerrainClass c) {
  switch (c) {
    case TerrainClass::Flat: return "flat";
    case TerrainClass::Slope: return "slope";
    case TerrainClass::Rough: return "rough";
    case TerrainClass::Stairs: return "stairs";
  }
  return "flat";
}

TerrainClass classify_terrain(const Scene& scene, Vec2 p) {
  const HeightMap& hm = scene.heightmap;
  const int c = std::clamp(static_cast<int>(std::lround((p.x - hm.origin.x) / hm.cell_size)), 0, hm.cols - 1);
  const int r = std::clamp(static_cast<int>(std::lround((p.y - hm.origin.y) / hm.cell_size)), 0, hm.rows - 1);
  auto h = [&](int rr, int cc) {
    return hm.at(std::clamp(rr, 0, hm.rows - 1), std::clamp(cc, 0, hm.cols - 1));
  };
  const double h0 = h(r, c);
  double max_step = 0.0;
  double max_second = 0.0;
  for (auto [dr, dc] : {std::pair{0, 1}, std::pair{1, 0}}) {
    const double fwd = h(r + dr, c + dc) - h0;
    const double bwd = h0 - h(r - dr, c - dc);
    max_step = std::max({max_step, std::abs(fwd), std::abs(bwd)});
    max_second = std::max(max_second, std::abs(fwd - bwd));
  }
  if (max_step < 1e-9) return TerrainClass::Flat;
  if (max_step >= 0.12) return TerrainClass::Stairs;
  if (max_second > 0.015) return TerrainClass::Rough;
  return TerrainClass::Slope;
}

}  // namespace scenepath
