#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "scenepath/route_graph.hpp"
#include "scenepath/scene.hpp"

namespace oracle {

using scenepath::GridGraph;
using scenepath::Vec2;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double envelope(double z) { return std::min(1.0 + 4.0 * (z - 0.4) / 0.8, 5.0); }

/// Plain Dijkstra over retained edges, returning the distance to every node.
inline std::vector<double> dijkstra(const GridGraph& g, int source) {
  std::vector<double> dist(static_cast<std::size_t>(g.rows * g.cols), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, n] = pq.top();
    pq.pop();
    if (d > dist[n]) continue;
    const int r = n / g.cols, c = n % g.cols;
    for (int k = 0; k < 8; ++k) {
      const int rr = r + GridGraph::kDr[k], cc = c + GridGraph::kDc[k];
      if (rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) continue;
      if (g.status[static_cast<std::size_t>(n) * 8 + k] != scenepath::EdgeStatus::Retained) continue;
      const int m = rr * g.cols + cc;
      const double nd = d + g.weights[static_cast<std::size_t>(n) * 8 + k];
      if (nd < dist[m]) {
        dist[m] = nd;
        pq.push({nd, m});
      }
    }
  }
  return dist;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

inline UnionFind components(const GridGraph& g) {
  UnionFind uf(g.rows * g.cols);
  for (int n = 0; n < g.rows * g.cols; ++n) {
    const int r = n / g.cols, c = n % g.cols;
    for (int k = 0; k < 8; ++k) {
      const int rr = r + GridGraph::kDr[k], cc = c + GridGraph::kDc[k];
      if (rr < 0 || cc < 0 || rr >= g.rows || cc >= g.cols) continue;
      if (g.status[static_cast<std::size_t>(n) * 8 + k] == scenepath::EdgeStatus::Retained) uf.unite(n, rr * g.cols + cc);
    }
  }
  return uf;
}

/// Even-odd ray casting.
inline bool inside(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

/// Lowest clearance among overhead footprints containing p.
inline double clearance(const scenepath::Scene& scene, Vec2 p) {
  double c = kInf;
  for (const auto& t : scene.top_obstacles) {
    if (inside(t.footprint, p)) c = std::min(c, t.clearance_height);
  }
  return c;
}

/// Pointwise largest beta = v^2 obeying caps, the boundary speeds and
/// beta_{i+1} - beta_i in [2 a_min ds, 2 a_max ds]. Empty when infeasible.
inline std::optional<std::vector<double>> max_beta(const std::vector<double>& s, const std::vector<double>& caps,
                                                   double a_max, double a_min, double v_start,
                                                   std::optional<double> v_end) {
  const std::size_t n = s.size();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = caps[i] * caps[i];
  if (v_start * v_start > b[0] + 1e-12) return std::nullopt;
  b[0] = v_start * v_start;
  if (v_end) {
    if (*v_end * *v_end > b[n - 1] + 1e-12) return std::nullopt;
    b[n - 1] = *v_end * *v_end;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) b[i + 1] = std::min(b[i + 1], b[i] + 2.0 * a_max * (s[i + 1] - s[i]));
  for (std::size_t i = n - 1; i > 0; --i) b[i - 1] = std::min(b[i - 1], b[i] - 2.0 * a_min * (s[i] - s[i - 1]));
  if (b[0] < v_start * v_start - 1e-9) return std::nullopt;
  if (v_end && b[n - 1] < *v_end * *v_end - 1e-9) return std::nullopt;
  return b;
}

/// Time to traverse with v^2 linear in s on each interval.
inline double traversal_time(const std::vector<double>& s, const std::vector<double>& beta) {
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double v0 = std::sqrt(std::max(beta[i], 0.0)), v1 = std::sqrt(std::max(beta[i + 1], 0.0));
    if (v0 + v1 <= 0.0) return kInf;
    t += 2.0 * (s[i + 1] - s[i]) / (v0 + v1);
  }
  return t;
}

}  // namespace oracle
