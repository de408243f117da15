#pragma once

#include <algorithm>
#include <cmath>

namespace mrplan {

// World frame: x grows with raster column, y grows with raster row, meters.
struct GroundRect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double center_x() const { return 0.5 * (min_x + max_x); }
  double center_y() const { return 0.5 * (min_y + max_y); }
  bool valid() const { return max_x > min_x && max_y > min_y; }

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

inline double overlap_area(const GroundRect& a, const GroundRect& b) {
  const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
  const double h = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

inline bool intersects(const GroundRect& a, const GroundRect& b) { return overlap_area(a, b) > 0.0; }

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Point3& p, const Point3& q) {
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.z - q.z) * (p.z - q.z));
}

// A camera pose above the field: footprint center (x, y), altitude h in meters,
// and the ground sampling distance in cm/px that h induces.
struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  double gsd = 0.0;

  Point3 position() const { return {x, y, h}; }
  bool operator==(const Waypoint&) const = default;
};

}  // namespace mrplan
