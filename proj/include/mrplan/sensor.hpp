#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrplan/camera.hpp"
#include "mrplan/worldmap.hpp"

namespace mrplan {

enum class ConfusionMode { Uniform, AdjacentClass };

// Synthetic segmentation error model. Each non-void pixel is mislabeled with
// probability eps(gsd) = min(eps0 + k_eps * gsd, 0.95).
struct SensorModel {
  double eps0 = 0.0;
  double k_eps = 0.0;
  ConfusionMode mode = ConfusionMode::Uniform;
  // confusion[c] lists the classes that c can be mistaken for in
  // AdjacentClass mode. An empty list means c is never corrupted.
  std::vector<std::vector<Label>> confusion;
  std::uint64_t seed = 0;

  double error_rate(double gsd) const;
  void validate(std::size_t num_classes) const;
};

std::uint64_t splitmix64(std::uint64_t x);

// Corruption stream for one capture, a pure function of the seed and the pose.
std::uint64_t capture_seed(std::uint64_t seed, const Waypoint& wp);

Observation observe(const SemanticMap& map, const CameraModel& cam, const Waypoint& wp, const SensorModel& model);

// File name used to look up a precomputed prediction: pred_<row>_<col>_<gsd*10>.pgm.
// row/col index the footprint-sized tile containing the waypoint center,
// counted from the map origin.
std::filesystem::path prediction_path(const std::filesystem::path& pred_dir, const SemanticMap& map,
                                      const CameraModel& cam, const Waypoint& wp);

Observation replay_observe(const std::filesystem::path& pred_dir, const SemanticMap& map, const CameraModel& cam,
                           const Waypoint& wp);

// Source of segmented images used by the mission engine.
class Sensor {
public:
  virtual ~Sensor() = default;
  virtual Observation capture(const SemanticMap& map, const CameraModel& cam, const Waypoint& wp) const = 0;
};

class SyntheticSensor final : public Sensor {
public:
  explicit SyntheticSensor(SensorModel model) : model_(std::move(model)) {}
  Observation capture(const SemanticMap& map, const CameraModel& cam, const Waypoint& wp) const override {
    return observe(map, cam, wp, model_);
  }
  const SensorModel& model() const { return model_; }

private:
  SensorModel model_;
};

class ReplaySensor final : public Sensor {
public:
  explicit ReplaySensor(std::filesystem::path pred_dir) : dir_(std::move(pred_dir)) {}
  Observation capture(const SemanticMap& map, const CameraModel& cam, const Waypoint& wp) const override {
    return replay_observe(dir_, map, cam, wp);
  }

private:
  std::filesystem::path dir_;
};

}  // namespace mrplan
