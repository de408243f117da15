#pragma once

#include <optional>
#include <vector>

#include "mrplan/geometry.hpp"

namespace mrplan {

// Nadir pinhole camera. Sensor width and focal length in centimeters.
struct CameraModel {
  double sensor_width_cm = 1.0;
  double focal_length_cm = 1.0;
  int image_width_px = 100;
  int image_height_px = 100;

  void validate() const;
};

// GSD in cm/px at altitude h (meters): h[cm] * S_w / (f * I_w).
double gsd_at(const CameraModel& cam, double h);
double altitude_for_gsd(const CameraModel& cam, double gsd);

Waypoint make_waypoint(const CameraModel& cam, double x, double y, double h);

GroundRect footprint(const CameraModel& cam, const Waypoint& wp);

// How a grid that does not tile its extent exactly is laid out.
//  Centered: grid spacing equals the footprint, the grid is centered on the
//            extent and the overhang (< one footprint) is split over both sides.
//            Footprints never overlap.
//  Inset:    outermost footprints touch the extent boundary and the remaining
//            centers are spaced evenly in between, so every footprint stays
//            inside the extent. Footprints overlap only when the extent is not
//            an integer multiple of the footprint.
enum class GridEdge { Centered, Inset };

// Boustrophedon coverage grid: rows along +y, first row left-to-right,
// alternating direction.
std::vector<Waypoint> lawnmower_waypoints(const GroundRect& extent, const CameraModel& cam, double h,
                                          GridEdge edge = GridEdge::Centered);

// Lawnmower grid at h_prime confined to the parent's footprint. The start
// corner is the one nearest the parent; ties go to the ordering whose last
// waypoint is nearest `exit_toward`, when given.
std::vector<Waypoint> descent_waypoints(const Waypoint& parent, const CameraModel& cam, double h_prime,
                                        std::optional<Point3> exit_toward = std::nullopt);

// Number of cells needed to cover `length` with cells of size `cell`.
int cover_count(double length, double cell);

}  // namespace mrplan
