#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "mrplan/geometry.hpp"

namespace mrplan {

using Label = std::uint8_t;

// Reserved marker for pixels outside the field. Never counted by any metric.
inline constexpr Label kVoidLabel = 255;
inline constexpr std::size_t kMaxClasses = 255;

// Row-major grid of class labels.
struct LabelGrid {
  int width = 0;
  int height = 0;
  std::vector<Label> data;

  LabelGrid() = default;
  LabelGrid(int w, int h, Label fill = kVoidLabel)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  Label at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
  Label& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
  std::size_t size() const { return data.size(); }
  bool operator==(const LabelGrid&) const = default;
};

// Georeferenced raster of class labels with square pixels. Immutable after
// construction; the constructor enforces the label/legend invariants.
class SemanticMap {
public:
  SemanticMap(LabelGrid labels, double resolution_m, std::vector<std::string> legend, double origin_x = 0.0,
              double origin_y = 0.0);

  int width_px() const { return labels_.width; }
  int height_px() const { return labels_.height; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  const std::vector<std::string>& legend() const { return legend_; }
  std::size_t num_classes() const { return legend_.size(); }
  const LabelGrid& labels() const { return labels_; }
  Label label(int row, int col) const { return labels_.at(row, col); }

  GroundRect extent() const {
    return {origin_x_, origin_y_, origin_x_ + width_px() * resolution_, origin_y_ + height_px() * resolution_};
  }

  // Index of the class called `name`, or throws.
  Label class_index(const std::string& name) const;

private:
  LabelGrid labels_;
  double resolution_;
  std::vector<std::string> legend_;
  double origin_x_;
  double origin_y_;
};

// A segmented label patch registered to the ground.
struct Observation {
  GroundRect rect;
  double gsd = 0.0;  // cm/px
  LabelGrid labels;
  Waypoint waypoint;
};

// Best-resolution-wins mosaic on the grid of a reference map.
struct StitchedMap {
  static constexpr double kUnobserved = std::numeric_limits<double>::infinity();

  LabelGrid labels;
  std::vector<double> best_gsd;  // cm/px per pixel, kUnobserved until first write
  double resolution = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<std::string> legend;

  static StitchedMap blank_like(const SemanticMap& map);

  double gsd_at(int row, int col) const { return best_gsd[static_cast<std::size_t>(row) * labels.width + col]; }
  GroundRect extent() const {
    return {origin_x, origin_y, origin_x + labels.width * resolution, origin_y + labels.height * resolution};
  }
};

// Binary PGM (P5) with one byte per pixel.
LabelGrid read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const LabelGrid& grid);

// Raster plus JSON sidecar {classes, resolution_m_per_px, origin_x_m, origin_y_m}.
SemanticMap load_map(const std::filesystem::path& raster_path, const std::filesystem::path& legend_path);
void save_map(const SemanticMap& map, const std::filesystem::path& raster_path,
              const std::filesystem::path& legend_path);

// Nearest-neighbour sample of the map on a cols x rows grid spanning rect.
// Cells whose centers fall outside the map are void.
LabelGrid sample_labels(const SemanticMap& map, const GroundRect& rect, int cols, int rows);

// Map labels over rect resampled to out_gsd (cm/px). Throws if rect misses the map.
LabelGrid ground_truth_patch(const SemanticMap& map, const GroundRect& rect, double out_gsd);

// Writes obs into every covered pixel whose best_gsd is not finer than obs.gsd.
// Equal GSD overwrites (last writer wins). Void observation cells are skipped.
void stitch(StitchedMap& stitched, const Observation& obs);

// Labels as PGM + sidecar, and the best_gsd raster as PGM with value
// round(gsd * 10) (clamped to 254) and 255 for unobserved pixels.
void write_stitched(const StitchedMap& stitched, const std::filesystem::path& labels_path,
                    const std::filesystem::path& legend_path, const std::filesystem::path& gsd_path);

// Range of map pixel indices whose centers fall inside rect, clipped to the grid.
struct PixelSpan {
  int col0 = 0, col1 = -1;  // inclusive
  int row0 = 0, row1 = -1;
  bool empty() const { return col1 < col0 || row1 < row0; }
};
PixelSpan pixel_span(const GroundRect& rect, double origin_x, double origin_y, double resolution, int width,
                     int height);

}  // namespace mrplan
