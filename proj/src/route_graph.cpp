#include "scenepath/route_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include <fmt/format.h>

#include "scenepath/error.hpp"

namespace scenepath {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::Retained: return "retained";
    case EdgeStatus::Wall: return "wall";
    case EdgeStatus::LowClearance: return "low-clearance";
    case EdgeStatus::InfeasibleSlope: return "infeasible-slope";
    case EdgeStatus::Blocked: return "blocked";
  }
  return "retained";
}

int GridGraph::neighbor(int n, int d) const {
  const int r = row(n) + kDr[d];
  const int c = col(n) + kDc[d];
  if (r < 0 || c < 0 || r >= rows || c >= cols) return -1;
  return node(r, c);
}

int GridGraph::degree(int n) const {
  int k = 0;
  for (int d = 0; d < 8; ++d) k += retained(n, d) ? 1 : 0;
  return k;
}

void GridGraph::remove_edge(int n, int d, EdgeStatus reason) {
  const int m = neighbor(n, d);
  if (m < 0) return;
  status[static_cast<std::size_t>(n) * 8 + d] = reason;
  status[static_cast<std::size_t>(m) * 8 + (d + 4) % 8] = reason;
}

int GridGraph::nearest_node(Vec2 p) const {
  const int c = std::clamp(static_cast<int>(std::lround((p.x - origin.x) / cell_size)), 0, cols - 1);
  const int r = std::clamp(static_cast<int>(std::lround((p.y - origin.y) / cell_size)), 0, rows - 1);
  return node(r, c);
}

int GridGraph::nearest_live_node(Vec2 p, int max_cells) const {
  const int center = nearest_node(p);
  if (degree(center) > 0) return center;
  int best = -1;
  double best_d = kInf;
  const int r0 = row(center);
  const int c0 = col(center);
  for (int r = std::max(0, r0 - max_cells); r <= std::min(rows - 1, r0 + max_cells); ++r) {
    for (int c = std::max(0, c0 - max_cells); c <= std::min(cols - 1, c0 + max_cells); ++c) {
      const int n = node(r, c);
      if (degree(n) == 0) continue;
      const double d = distance(position(n), p);
      if (d < best_d) {
        best_d = d;
        best = n;
      }
    }
  }
  return best;
}

double edge_weight(const GridGraph& g, int n, int d, double c_slope) {
  const int m = g.neighbor(n, d);
  auto leg = [&](double horiz, double dh) { return std::hypot(horiz, dh) * std::exp(c_slope * std::abs(dh) / horiz); };
  if (d % 2 == 0) return leg(g.cell_size, g.ground[m] - g.ground[n]);
  // diagonals cross the cell interior: go through the interpolated centre
  const int rn = n / g.cols, cn = n % g.cols, rm = m / g.cols, cm = m % g.cols;
  const double centre = 0.25 * (g.ground[n] + g.ground[m] + g.ground[g.node(rn, cm)] + g.ground[g.node(rm, cn)]);
  const double half = 0.5 * g.cell_size * std::numbers::sqrt2;
  return leg(half, centre - g.ground[n]) + leg(half, g.ground[m] - centre);
}

GridGraph build_graph(const Scene& scene, const GraphParams& params) {
  const HeightMap& hm = scene.heightmap;
  if (hm.rows < 2 || hm.cols < 2) {
    throw Error(ErrorKind::DegenerateGraph, "build_graph", "heightmap must be at least 2x2");
  }
  GridGraph g;
  g.rows = hm.rows;
  g.cols = hm.cols;
  g.cell_size = hm.cell_size;
  g.origin = hm.origin;
  g.params = params;
  g.ground = hm.heights;
  const auto count = static_cast<std::size_t>(g.node_count());
  g.weights.assign(count * 8, 0.0);
  g.status.assign(count * 8, EdgeStatus::Retained);

  std::vector<double> node_clearance(count);
  for (int n = 0; n < g.node_count(); ++n) node_clearance[n] = scene.clearance_at(g.position(n));

  for (int n = 0; n < g.node_count(); ++n) {
    for (int d = 0; d < 8; ++d) {
      const int m = g.neighbor(n, d);
      const std::size_t k = static_cast<std::size_t>(n) * 8 + d;
      if (m < 0) {
        g.status[k] = EdgeStatus::Blocked;
        continue;
      }
      g.weights[k] = edge_weight(g, n, d, params.c_slope);
      if (d >= 4) continue;  // decided once per undirected edge below
      const double horiz = (d % 2 == 0) ? g.cell_size : g.cell_size * std::numbers::sqrt2;
      EdgeStatus st = EdgeStatus::Retained;
      const Vec2 mid = (g.position(n) + g.position(m)) * 0.5;
      if (node_clearance[n] < params.min_crawl_clearance || node_clearance[m] < params.min_crawl_clearance ||
          scene.clearance_at(mid) < params.min_crawl_clearance) {
        st = EdgeStatus::LowClearance;
      } else if (std::abs(g.ground[m] - g.ground[n]) / horiz > params.slope_limit) {
        st = EdgeStatus::InfeasibleSlope;
      }
      if (st != EdgeStatus::Retained) g.remove_edge(n, d, st);
    }
  }

  // Walls take precedence over the other removal reasons.
  const double reach = params.agent_radius + 2.0 * g.cell_size;
  for (const StaticObstacle& obs : scene.static_obstacles) {
    const Box box = bounding_box(obs.footprint);
    const int c_lo = std::max(0, static_cast<int>(std::floor((box.lo.x - reach - g.origin.x) / g.cell_size)));
    const int c_hi = std::min(g.cols - 1, static_cast<int>(std::ceil((box.hi.x + reach - g.origin.x) / g.cell_size)));
    const int r_lo = std::max(0, static_cast<int>(std::floor((box.lo.y - reach - g.origin.y) / g.cell_size)));
    const int r_hi = std::min(g.rows - 1, static_cast<int>(std::ceil((box.hi.y + reach - g.origin.y) / g.cell_size)));
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        const int n = g.node(r, c);
        for (int d = 0; d < 8; ++d) {
          const int m = g.neighbor(n, d);
          if (m < 0 || g.edge_status(n, d) == EdgeStatus::Wall) continue;
          if (distance_segment_polygon(obs.footprint, g.position(n), g.position(m)) < params.agent_radius - 1e-9) {
            g.remove_edge(n, d, EdgeStatus::Wall);
          }
        }
      }
    }
  }
  return g;
}

std::vector<Vec2> CoarsePath::points(const GridGraph& graph) const {
  std::vector<Vec2> out;
  out.reserve(nodes.size());
  for (int n : nodes) out.push_back(graph.position(n));
  return out;
}

double octile_distance(Vec2 a, Vec2 b) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (std::numbers::sqrt2 - 1.0) * std::min(dx, dy);
}

GoalIndex::GoalIndex(std::vector<Vec2> points) : pts_(std::move(points)) {
  build(0, static_cast<int>(pts_.size()), 0);
}

void GoalIndex::build(int lo, int hi, int depth) {
  if (hi - lo <= 1) return;
  const int mid = (lo + hi) / 2;
  const bool by_x = depth % 2 == 0;
  std::nth_element(pts_.begin() + lo, pts_.begin() + mid, pts_.begin() + hi, [by_x](Vec2 a, Vec2 b) {
    return by_x ? (a.x < b.x || (a.x == b.x && a.y < b.y)) : (a.y < b.y || (a.y == b.y && a.x < b.x));
  });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

// Octile distance is at least the gap along either axis, so the usual
// splitting-plane test prunes correctly.
void GoalIndex::query(int lo, int hi, int depth, Vec2 p, double& best) const {
  if (lo >= hi) return;
  const int mid = (lo + hi) / 2;
  const Vec2 q = pts_[mid];
  best = std::min(best, octile_distance(p, q));
  const double diff = depth % 2 == 0 ? p.x - q.x : p.y - q.y;
  const bool left_first = diff < 0.0;
  if (left_first) {
    query(lo, mid, depth + 1, p, best);
    if (std::abs(diff) < best) query(mid + 1, hi, depth + 1, p, best);
  } else {
    query(mid + 1, hi, depth + 1, p, best);
    if (std::abs(diff) < best) query(lo, mid, depth + 1, p, best);
  }
}

double GoalIndex::nearest_octile(Vec2 p) const {
  double best = kInf;
  query(0, static_cast<int>(pts_.size()), 0, p, best);
  return best;
}

namespace {

std::string boundary_summary(const GridGraph& g, const std::vector<char>& reached) {
  std::array<int, 5> counts{};
  for (int n = 0; n < g.node_count(); ++n) {
    if (!reached[n]) continue;
    for (int d = 0; d < 8; ++d) {
      const int m = g.neighbor(n, d);
      if (m < 0 || reached[m] || g.retained(n, d)) continue;
      ++counts[static_cast<int>(g.edge_status(n, d))];
    }
  }
  return fmt::format("component boundary: wall={} low-clearance={} infeasible-slope={} blocked={}",
                     counts[static_cast<int>(EdgeStatus::Wall)], counts[static_cast<int>(EdgeStatus::LowClearance)],
                     counts[static_cast<int>(EdgeStatus::InfeasibleSlope)], counts[static_cast<int>(EdgeStatus::Blocked)]);
}

struct QueueEntry {
  double f;
  double h;
  int node;
  double g;
  bool operator>(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return node > o.node;
  }
};

}  // namespace

CoarsePath astar(const GridGraph& g, int start, const std::vector<int>& goals, std::string_view goal_name) {
  if (goals.empty()) throw Error(ErrorKind::Validation, "astar", "empty goal set");
  if (start < 0 || start >= g.node_count()) throw Error(ErrorKind::Validation, "astar", "start outside the grid");
  const auto count = static_cast<std::size_t>(g.node_count());
  std::vector<char> is_goal(count, 0);
  std::vector<Vec2> goal_pts;
  for (int n : goals) {
    if (!is_goal[n]) goal_pts.push_back(g.position(n));
    is_goal[n] = 1;
  }
  const GoalIndex index(goal_pts);

  std::vector<double> gcost(count, kInf);
  std::vector<double> hcache(count, -1.0);
  std::vector<int> parent(count, -1);
  std::vector<char> reached(count, 0);
  auto heuristic = [&](int n) {
    if (hcache[n] < 0.0) hcache[n] = index.nearest_octile(g.position(n));
    return hcache[n];
  };

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  gcost[start] = 0.0;
  reached[start] = 1;
  open.push({heuristic(start), heuristic(start), start, 0.0});
  int best_goal = -1;
  double best_cost = kInf;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    // Keep expanding through the rounding band above the best goal so the
    // result matches an exhaustive label-setting search bit for bit.
    if (top.f > best_cost * (1.0 + 1e-12) + 1e-300) break;
    const int u = top.node;
    if (top.g != gcost[u]) continue;  // stale
    if (is_goal[u]) {
      if (gcost[u] < best_cost || (gcost[u] == best_cost && u < best_goal)) {
        best_cost = gcost[u];
        best_goal = u;
      }
      continue;
    }
    for (int d = 0; d < 8; ++d) {
      if (!g.retained(u, d)) continue;
      const int v = g.neighbor(u, d);
      const double cand = gcost[u] + g.weight(u, d);
      reached[v] = 1;
      if (cand < gcost[v]) {
        gcost[v] = cand;
        parent[v] = u;
        const double h = heuristic(v);
        open.push({cand + h, h, v, cand});
      }
    }
  }
  if (best_goal < 0) {
    throw Error(ErrorKind::Unreachable, "astar",
                fmt::format("landmark '{}' is unreachable; {}", goal_name, boundary_summary(g, reached)));
  }
  CoarsePath path;
  path.cost = best_cost;
  for (int n = best_goal; n >= 0; n = parent[n]) path.nodes.push_back(n);
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

std::vector<int> landmark_nodes(const GridGraph& g, const Landmark& landmark) {
  std::vector<int> out;
  for (Vec2 p : landmark.cells) out.push_back(g.nearest_node(p));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CoarsePath astar_to_landmark(const GridGraph& g, Vec2 start, const Landmark& goal) {
  int s = g.nearest_live_node(start);
  if (s < 0) s = g.nearest_node(start);
  return astar(g, s, landmark_nodes(g, goal), goal.name);
}

std::vector<int> component_labels(const GridGraph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.node_count()), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < g.node_count(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int d = 0; d < 8; ++d) {
        if (!g.retained(u, d)) continue;
        const int v = g.neighbor(u, d);
        if (label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

std::vector<std::vector<bool>> reachability(const GridGraph& g, const std::vector<Landmark>& landmarks) {
  const std::vector<int> label = component_labels(g);
  const std::size_t k = landmarks.size();
  std::vector<std::vector<int>> labels(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (int n : landmark_nodes(g, landmarks[i])) labels[i].push_back(label[n]);
    std::sort(labels[i].begin(), labels[i].end());
  }
  std::vector<std::vector<bool>> m(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    m[i][i] = true;
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<int> common;
      std::set_intersection(labels[i].begin(), labels[i].end(), labels[j].begin(), labels[j].end(),
                            std::back_inserter(common));
      m[i][j] = m[j][i] = !common.empty();
    }
  }
  return m;
}

void write_edge_csv(const GridGraph& g, std::ostream& out) {
  out << "node_a,node_b,weight,removal_reason\n";
  for (int n = 0; n < g.node_count(); ++n) {
    for (int d = 0; d < 4; ++d) {
      const int m = g.neighbor(n, d);
      if (m < 0) continue;
      out << fmt::format("{},{},{:.17g},{}\n", n, m, g.weight(n, d),
                         g.retained(n, d) ? "" : to_string(g.edge_status(n, d)));
    }
  }
}

}  // namespace scenepath
