#pragma once

#include <string>
#include <vector>

#include "scenepath/bench.hpp"

namespace scenepath {

inline constexpr int kSchemaVersion = 1;

std::string path_csv(const GeometricPath& path);
/// Columns s, v_cap, v, beta, t.
std::string profile_csv(const SpeedProfile& profile, const std::vector<double>& caps);
std::string trajectory_csv(const Trajectory& trajectory);
std::string trace_csv(const std::vector<TraceRow>& trace);

/// Whole-route tables: a leading segment column, arc length and time
/// accumulated across segments.
std::string route_path_csv(const RoutePlan& plan);
std::string route_profile_csv(const RoutePlan& plan);
std::string route_trajectory_csv(const RoutePlan& plan);

/// A CSV table with a header row as a JSON array of records. Numeric cells
/// become numbers.
std::string csv_to_json(const std::string& csv);

std::string plan_summary_json(const RoutePlan& plan);
std::string run_report_json(const RunReport& report, std::uint64_t seed);

std::string slalom_csv(const std::vector<SlalomRow>& rows);
std::string slalom_json(const SlalomBenchResult& result, std::uint64_t seed, int runs);
std::string pyramid_csv(const std::vector<PyramidRow>& rows);
std::string pyramid_json(const std::vector<PyramidRow>& rows);
std::string random_bench_csv(const RandomBenchResult& result);
std::string random_bench_json(const RandomBenchResult& result, std::uint64_t seed);

/// Writes `content` to `path`, creating parent directories. Throws Io.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace scenepath
