#include "mrplan/sensor.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "mrplan/error.hpp"

namespace mrplan {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr double kMaxErrorRate = 0.95;

// Uniform double in [0, 1) from the top 53 bits.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace

double SensorModel::error_rate(double gsd) const { return std::min(eps0 + k_eps * gsd, kMaxErrorRate); }

void SensorModel::validate(std::size_t num_classes) const {
  if (!(eps0 >= 0.0) || !(k_eps >= 0.0)) throw Error("sensor eps0 and k_eps must be non-negative");
  if (mode == ConfusionMode::AdjacentClass) {
    if (confusion.size() != num_classes) {
      throw Error("adjacent-class confusion needs one list per legend class");
    }
    for (std::size_t c = 0; c < confusion.size(); ++c) {
      for (Label t : confusion[c]) {
        if (t >= num_classes || t == c) throw Error("confusion list for class " + std::to_string(c) + " is invalid");
      }
    }
  }
}

std::uint64_t capture_seed(std::uint64_t seed, const Waypoint& wp) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ std::bit_cast<std::uint64_t>(wp.x));
  s = splitmix64(s ^ std::bit_cast<std::uint64_t>(wp.y));
  s = splitmix64(s ^ std::bit_cast<std::uint64_t>(wp.h));
  return s;
}

Observation observe(const SemanticMap& map, const CameraModel& cam, const Waypoint& wp, const SensorModel& model) {
  Observation obs;
  obs.waypoint = wp;
  obs.gsd = wp.gsd;
  obs.rect = footprint(cam, wp);
  if (!intersects(obs.rect, map.extent())) {
    throw Error("camera footprint at (" + std::to_string(wp.x) + ", " + std::to_string(wp.y) +
                ") lies fully outside the map");
  }
  obs.labels = sample_labels(map, obs.rect, cam.image_width_px, cam.image_height_px);

  const double eps = model.error_rate(wp.gsd);
  if (eps <= 0.0) return obs;
  const std::size_t num_classes = map.num_classes();
  std::mt19937_64 rng(capture_seed(model.seed, wp));
  for (Label& l : obs.labels.data) {
    if (l == kVoidLabel) continue;
    if (unit_double(rng) >= eps) continue;
    if (model.mode == ConfusionMode::Uniform) {
      if (num_classes < 2) continue;
      const auto r = static_cast<Label>(pick(rng, num_classes - 1));
      l = r < l ? r : static_cast<Label>(r + 1);
    } else {
      const auto& alts = model.confusion[l];
      if (!alts.empty()) l = alts[pick(rng, alts.size())];
    }
  }
  return obs;
}

std::filesystem::path prediction_path(const std::filesystem::path& pred_dir, const SemanticMap& map,
                                      const CameraModel& cam, const Waypoint& wp) {
  const GroundRect fp = footprint(cam, wp);
  const long col = static_cast<long>(std::floor((wp.x - map.origin_x()) / fp.width()));
  const long row = static_cast<long>(std::floor((wp.y - map.origin_y()) / fp.height()));
  const long tier = std::lround(wp.gsd * 10.0);
  return pred_dir / ("pred_" + std::to_string(row) + "_" + std::to_string(col) + "_" + std::to_string(tier) + ".pgm");
}

Observation replay_observe(const std::filesystem::path& pred_dir, const SemanticMap& map, const CameraModel& cam,
                           const Waypoint& wp) {
  const auto path = prediction_path(pred_dir, map, cam, wp);
  if (!std::filesystem::exists(path)) {
    throw Error("no prediction for waypoint: expected " + path.string());
  }
  Observation obs;
  obs.waypoint = wp;
  obs.gsd = wp.gsd;
  obs.rect = footprint(cam, wp);
  obs.labels = read_pgm(path);
  if (obs.labels.width != cam.image_width_px || obs.labels.height != cam.image_height_px) {
    throw Error("prediction dimension mismatch in " + path.string() + ": got " + std::to_string(obs.labels.width) +
                "x" + std::to_string(obs.labels.height) + ", camera is " + std::to_string(cam.image_width_px) + "x" +
                std::to_string(cam.image_height_px));
  }
  for (Label l : obs.labels.data) {
    if (l != kVoidLabel && l >= map.num_classes()) {
      throw Error("label out of legend range in prediction " + path.string());
    }
  }
  return obs;
}

}  // namespace mrplan
