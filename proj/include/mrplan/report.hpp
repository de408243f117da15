#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrplan/planner.hpp"

namespace mrplan {

// Shortest decimal text that parses back to the same double. Non-finite
// values print as "nan", "inf" or "-inf".
std::string format_number(double v);

// index,x,y,h,gsd,arrival_t,action,sigma,miou
void write_trajectory_csv(const std::filesystem::path& path, const MissionResult& mission);

// One row per captured image: x,y,h,gsd,sigma,iou_<class>...,miou,vacuous.
void write_images_csv(const std::filesystem::path& path, const MissionResult& mission,
                      const std::vector<std::string>& legend, const InterestSet& interest);

nlohmann::json mission_summary(const MissionResult& mission, const std::string& strategy, std::uint64_t seed,
                               const nlohmann::json& resolved_config);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct CurvePoint {
  std::string strategy;  // "lawnmower", "non-adaptive", "adaptive", "linear"
  double gsd = 0.0;      // fixed GSD for lawnmower rows, starting GSD otherwise
  double total_time = 0.0;
  double field_miou = 0.0;
};

// strategy,gsd,total_time_s,field_miou
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& points);

// Accuracy against execution time, lawnmower rows joined as a curve.
void write_scatter_svg(const std::filesystem::path& path, const std::vector<CurvePoint>& points);

struct PathPanel {
  std::string title;
  const MissionResult* mission = nullptr;
};

// Top-down flight paths, one panel per strategy, waypoints colored by altitude.
void write_paths_svg(const std::filesystem::path& path, const std::vector<PathPanel>& panels,
                     const GroundRect& extent, double h_min, double h_max);

}  // namespace mrplan
