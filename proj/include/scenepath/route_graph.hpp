#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "scenepath/scene.hpp"

namespace scenepath {

struct GraphParams {
  double slope_limit = 1.0;          // max |dh| / horizontal length
  double agent_radius = 0.4;         // static footprints are inflated by this
  double min_crawl_clearance = 0.5;  // lowest ceiling the agent can crawl under
  double c_slope = 0.0;              // weight = d * exp(c_slope * slope)
};

enum class EdgeStatus : std::uint8_t { Retained, Wall, LowClearance, InfeasibleSlope, Blocked };
const char* to_string(EdgeStatus s);

/// 8-connected grid with one node per heightmap sample. Edges are stored per
/// node and direction; both directions of an edge always agree.
struct GridGraph {
  static constexpr std::array<int, 8> kDr{0, 1, 1, 1, 0, -1, -1, -1};
  static constexpr std::array<int, 8> kDc{1, 1, 0, -1, -1, -1, 0, 1};

  int rows = 0;
  int cols = 0;
  double cell_size = 0.25;
  Vec2 origin;
  GraphParams params;
  std::vector<double> ground;        // per node
  std::vector<double> weights;       // node * 8 + dir
  std::vector<EdgeStatus> status;    // node * 8 + dir

  int node_count() const { return rows * cols; }
  int node(int r, int c) const { return r * cols + c; }
  int row(int n) const { return n / cols; }
  int col(int n) const { return n % cols; }
  Vec2 position(int n) const { return {origin.x + col(n) * cell_size, origin.y + row(n) * cell_size}; }
  /// Neighbour in direction d, or -1 outside the grid.
  int neighbor(int n, int d) const;
  bool retained(int n, int d) const { return status[static_cast<std::size_t>(n) * 8 + d] == EdgeStatus::Retained; }
  double weight(int n, int d) const { return weights[static_cast<std::size_t>(n) * 8 + d]; }
  EdgeStatus edge_status(int n, int d) const { return status[static_cast<std::size_t>(n) * 8 + d]; }
  int degree(int n) const;
  /// Marks both directions of the edge.
  void remove_edge(int n, int d, EdgeStatus reason);
  /// Grid node nearest to p (clamped to the grid).
  int nearest_node(Vec2 p) const;
  /// Nearest node with at least one retained edge within `max_cells`, else -1.
  int nearest_live_node(Vec2 p, int max_cells = 3) const;
};

/// Throws DegenerateGraph for heightmaps smaller than 2x2.
GridGraph build_graph(const Scene& scene, const GraphParams& params = {});

/// d * exp(c_slope * slope) with d the 3D edge length. Diagonals are two legs
/// through the cell centre height.
double edge_weight(const GridGraph& graph, int node, int dir, double c_slope);

struct CoarsePath {
  std::vector<int> nodes;
  double cost = 0.0;

  std::vector<Vec2> points(const GridGraph& graph) const;
};

/// Static 2D tree over goal positions answering octile-distance nearest queries.
class GoalIndex {
 public:
  explicit GoalIndex(std::vector<Vec2> points);
  /// min over goals of the octile distance to p.
  double nearest_octile(Vec2 p) const;
  bool empty() const { return pts_.empty(); }

 private:
  void build(int lo, int hi, int depth);
  void query(int lo, int hi, int depth, Vec2 p, double& best) const;
  std::vector<Vec2> pts_;
};

double octile_distance(Vec2 a, Vec2 b);

/// Multi-goal A*. Throws Unreachable with the boundary removal counts of the
/// start's component.
CoarsePath astar(const GridGraph& graph, int start, const std::vector<int>& goals, std::string_view goal_name = "goal");

/// Goal set = the landmark's cells snapped to grid nodes.
CoarsePath astar_to_landmark(const GridGraph& graph, Vec2 start, const Landmark& goal);

std::vector<int> landmark_nodes(const GridGraph& graph, const Landmark& landmark);

/// Connected component label per node over retained edges.
std::vector<int> component_labels(const GridGraph& graph);

/// m[i][j] is true when some node of landmark i shares a component with one of landmark j.
std::vector<std::vector<bool>> reachability(const GridGraph& graph, const std::vector<Landmark>& landmarks);

/// CSV edge list: node_a,node_b,weight,removal_reason (one row per undirected edge).
void write_edge_csv(const GridGraph& graph, std::ostream& out);

}  // namespace scenepath
