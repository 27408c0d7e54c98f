#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenepath/sim.hpp"

namespace scenepath {

struct SlalomParams {
  double corridor_width = 2.0;
  int baffles = 5;
  double gap = 1.2;
  double baffle_thickness = 0.2;
  double baffle_spacing = 2.5;
  double approach = 4.0;  // free corridor before the first baffle
  double exit = 8.0;      // free corridor after the last baffle
  double cell_size = 0.25;
};

/// Straight corridor along +x with baffles alternately attached to the lower
/// and upper wall. Landmarks "start" and "finish" sit at the two ends.
Scene make_slalom(const SlalomParams& params = {});

struct PyramidParams {
  double half_width = 3.0;
  double peak = 1.5;
  double apron = 6.0;
  double cell_size = 0.25;
};

/// Square hill centred at the origin on a flat apron, landmarks "west" and "east".
Scene make_pyramid(const PyramidParams& params = {});
/// Bounding square of the heightmap nodes raised above the apron.
Polygon pyramid_footprint(const PyramidParams& params = {});

/// Length of the path whose segment midpoints lie strictly inside the footprint.
double length_inside(const GeometricPath& path, const Polygon& footprint);

struct CrossingParams {
  double length = 24.0;
  double width = 12.0;
  double cell_size = 0.25;
};

/// Open field with landmarks "west" and "east" and one obstacle whose
/// straight-line motion meets the unperturbed walking plan head on. The
/// crossing point, speed, radius and side vary with `index`.
Scene make_crossing(std::uint64_t seed, std::uint64_t index, const CrossingParams& params = {});
RouteRequest crossing_route(const Scene& scene);

struct QpConfig {
  std::string label;
  double a_lat_max = 2.0;
  double a_max = 0.5;
};

struct SlalomRow {
  std::string label;
  std::string kind;  // "qp" or "constant"
  double a_lat_max = 0.0;
  double a_max = 0.0;
  double speed = 0.0;  // constant speed, or average planned speed for qp rows
  double planned_time = 0.0;
  double mean_time = 0.0;
  double failure_rate = 0.0;
  double mean_disposition = 0.0;
  double mean_xy = 0.0;
  double mean_z = 0.0;
  bool pareto_failure = false;      // undominated in (time, failure rate)
  bool pareto_disposition = false;  // undominated in (time, disposition)
};

/// Simulation settings the slalom runs use: consistent planner, no stop at the finish.
SimConfig slalom_sim_defaults();

struct SlalomBenchConfig {
  std::vector<QpConfig> qp_configs{
      {"qp-lat2.0", 2.0, 0.5}, {"qp-lat3.0", 3.0, 0.5}, {"qp-lat4.0", 4.0, 0.5}, {"qp-lat5.0", 5.0, 0.5}};
  std::vector<double> constant_speeds{1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  int runs = 100;
  double sigma = 0.1;  // lateral noise on every terrain class
  SlalomParams scene;
  SimConfig sim = slalom_sim_defaults();
  std::size_t matched_config = 0;  // qp config paired with a constant run of equal planned time
};

struct SlalomBenchResult {
  std::vector<SlalomRow> rows;
  SlalomRow matched_adaptive;
  SlalomRow matched_constant;
  Scene scene;
  GeometricPath adaptive_path;
  SpeedProfile adaptive_profile;
  std::vector<TraceRow> adaptive_trace;
  std::vector<TraceRow> constant_trace;
};

SlalomBenchResult slalom_bench(const SlalomBenchConfig& config, std::uint64_t seed);

/// Marks rows not dominated in (mean_time, failure_rate) and (mean_time, mean_disposition).
void mark_pareto(std::vector<SlalomRow>& rows);

struct PyramidRow {
  double c_slope = 0.0;
  double path_length = 0.0;
  double inside_length = 0.0;
  double climb = 0.0;  // cumulative |dh| along the coarse path
  double coarse_cost = 0.0;
};

std::vector<PyramidRow> pyramid_sweep(const std::vector<double>& c_values, const PyramidParams& params = {});

struct RandomBenchConfig {
  int scenes = 100;
  RandomSceneConfig scene;
  SimConfig sim;
};

struct RandomBenchResult {
  int scenes = 0;
  int successes = 0;
  std::map<std::string, int> failures;  // reason -> count
  std::vector<RunReport> reports;
  double success_rate() const { return scenes ? static_cast<double>(successes) / scenes : 0.0; }
};

/// Random 4-landmark route through a random permutation of the landmarks,
/// with a random locomotion per leg.
RouteRequest random_route(const Scene& scene, Rng& rng);

RandomBenchResult randomized_route_bench(const RandomBenchConfig& config, std::uint64_t seed);

}  // namespace scenepath
