#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrplan/camera.hpp"
#include "mrplan/decision.hpp"
#include "mrplan/gp.hpp"
#include "mrplan/planner.hpp"
#include "mrplan/sensor.hpp"

namespace mrplan {

inline constexpr int kConfigVersion = 1;

struct MapPaths {
  std::filesystem::path raster;
  std::filesystem::path legend;  // defaults to the raster path with a .json extension
};

enum class SensorKind { Synthetic, Replay };

struct SensorConfig {
  SensorKind kind = SensorKind::Synthetic;
  double eps0 = 0.0;
  double k_eps = 0.0;
  ConfusionMode mode = ConfusionMode::Uniform;
  // Adjacent-class lists by class name, resolved against the map legend at run time.
  std::vector<std::pair<std::string, std::vector<std::string>>> confusion;
  std::filesystem::path pred_dir;        // replay, test field
  std::filesystem::path train_pred_dir;  // replay, training field
};

// A fully resolved experiment. Paths are absolute after load_config.
struct ExperimentConfig {
  MapPaths train_map;
  MapPaths test_map;
  CameraModel camera;
  SensorConfig sensor;
  Kinematics kinematics;
  std::vector<std::string> interest_classes;
  std::vector<double> altitudes;  // strictly decreasing
  double tau_gain = 0.02;
  int max_depth = kUnboundedDepth;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::filesystem::path model_path;
  LinearPolicy linear;
  HyperBounds gp_bounds;

  // Candidate GSDs in cm/px, one per altitude.
  std::vector<double> gsds() const;
};

// Parses and validates config text. Relative paths resolve against base_dir.
// Throws ConfigError with the line of the offending key where it can be found.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON form with absolute paths. Parsing it back yields the same config.
nlohmann::json config_to_json(const ExperimentConfig& c);

// Sensor seeds for the test and training fields, both derived from the config seed.
std::uint64_t test_sensor_seed(std::uint64_t seed);
std::uint64_t train_sensor_seed(std::uint64_t seed);

SensorModel sensor_model(const ExperimentConfig& c, const SemanticMap& map, std::uint64_t seed);
// Sensor for the test field, or for the training field when `training` is set.
std::unique_ptr<Sensor> make_sensor(const ExperimentConfig& c, const SemanticMap& map, bool training);
InterestSet interest_set(const ExperimentConfig& c, const SemanticMap& map);

}  // namespace mrplan
