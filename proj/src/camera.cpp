#include "mrplan/camera.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mrplan/error.hpp"

namespace mrplan {

void CameraModel::validate() const {
  if (!(sensor_width_cm > 0.0) || !(focal_length_cm > 0.0) || image_width_px < 1 || image_height_px < 1) {
    throw Error("camera parameters must all be strictly positive");
  }
}

double gsd_at(const CameraModel& cam, double h) {
  if (!(h > 0.0)) throw Error("altitude must be positive, got " + std::to_string(h));
  return (h * 100.0 * cam.sensor_width_cm) / (cam.focal_length_cm * cam.image_width_px);
}

double altitude_for_gsd(const CameraModel& cam, double gsd) {
  if (!(gsd > 0.0)) throw Error("GSD must be positive, got " + std::to_string(gsd));
  return gsd * cam.focal_length_cm * cam.image_width_px / (100.0 * cam.sensor_width_cm);
}

Waypoint make_waypoint(const CameraModel& cam, double x, double y, double h) { return {x, y, h, gsd_at(cam, h)}; }

GroundRect footprint(const CameraModel& cam, const Waypoint& wp) {
  const double w = cam.image_width_px * wp.gsd / 100.0;
  const double h = cam.image_height_px * wp.gsd / 100.0;
  return {wp.x - 0.5 * w, wp.y - 0.5 * h, wp.x + 0.5 * w, wp.y + 0.5 * h};
}

int cover_count(double length, double cell) {
  // Relative slack so that exact multiples are not rounded up by float error.
  return std::max(1, static_cast<int>(std::ceil(length / cell - 1e-9)));
}

namespace {

std::vector<double> axis_centers(double lo, double hi, double cell, GridEdge edge) {
  const double length = hi - lo;
  const int n = cover_count(length, cell);
  std::vector<double> centers(static_cast<std::size_t>(n));
  if (n == 1) {
    centers[0] = 0.5 * (lo + hi);
    return centers;
  }
  if (edge == GridEdge::Centered) {
    const double first = 0.5 * (lo + hi) - 0.5 * (n - 1) * cell;
    for (int i = 0; i < n; ++i) centers[i] = first + i * cell;
  } else {
    const double step = (length - cell) / (n - 1);
    for (int i = 0; i < n; ++i) centers[i] = lo + 0.5 * cell + i * step;
    centers[n - 1] = hi - 0.5 * cell;
  }
  return centers;
}

std::vector<Waypoint> order_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const CameraModel& cam, double h, bool flip_x, bool flip_y) {
  const double gsd = gsd_at(cam, h);
  std::vector<Waypoint> out;
  out.reserve(xs.size() * ys.size());
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  for (int jr = 0; jr < ny; ++jr) {
    const int j = flip_y ? ny - 1 - jr : jr;
    const bool forward = ((jr % 2) == 0) != flip_x;
    for (int ir = 0; ir < nx; ++ir) {
      const int i = forward ? ir : nx - 1 - ir;
      out.push_back({xs[i], ys[j], h, gsd});
    }
  }
  return out;
}

}  // namespace

std::vector<Waypoint> lawnmower_waypoints(const GroundRect& extent, const CameraModel& cam, double h, GridEdge edge) {
  if (!extent.valid()) throw Error("lawnmower extent must be non-empty");
  const Waypoint probe = make_waypoint(cam, 0.0, 0.0, h);
  const GroundRect fp = footprint(cam, probe);
  const auto xs = axis_centers(extent.min_x, extent.max_x, fp.width(), edge);
  const auto ys = axis_centers(extent.min_y, extent.max_y, fp.height(), edge);
  return order_grid(xs, ys, cam, h, false, false);
}

std::vector<Waypoint> descent_waypoints(const Waypoint& parent, const CameraModel& cam, double h_prime,
                                        std::optional<Point3> exit_toward) {
  if (!(h_prime < parent.h)) {
    throw Error("descent altitude " + std::to_string(h_prime) + " must be below parent altitude " +
                std::to_string(parent.h));
  }
  const GroundRect parent_fp = footprint(cam, parent);
  const GroundRect fp = footprint(cam, make_waypoint(cam, 0.0, 0.0, h_prime));
  const auto xs = axis_centers(parent_fp.min_x, parent_fp.max_x, fp.width(), GridEdge::Inset);
  const auto ys = axis_centers(parent_fp.min_y, parent_fp.max_y, fp.height(), GridEdge::Inset);

  const Point3 here{parent.x, parent.y, parent.h};
  std::vector<Waypoint> best;
  double best_start = std::numeric_limits<double>::infinity();
  double best_exit = std::numeric_limits<double>::infinity();
  constexpr double kTie = 1e-9;
  for (int variant = 0; variant < 4; ++variant) {
    auto cand = order_grid(xs, ys, cam, h_prime, (variant & 1) != 0, (variant & 2) != 0);
    const double start = distance(here, cand.front().position());
    const double exit = exit_toward ? distance(*exit_toward, cand.back().position()) : 0.0;
    const bool better = start < best_start - kTie || (start <= best_start + kTie && exit < best_exit - kTie);
    if (best.empty() || better) {
      best = std::move(cand);
      best_start = start;
      best_exit = exit;
    }
  }
  return best;
}

}  // namespace mrplan
