#include <doctest.h>

#include <cmath>
#include <random>

#include "mrplan/camera.hpp"
#include "mrplan/error.hpp"

using namespace mrplan;

namespace {

CameraModel ref_cam() { return {}; }  // 1 cm sensor, 1 cm focal length, 100x100 px

bool covered(const std::vector<Waypoint>& wps, const CameraModel& cam, double x, double y) {
  for (const auto& w : wps) {
    if (footprint(cam, w).contains(x, y)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("gsd_at") {
  CHECK(gsd_at(ref_cam(), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gsd_at(ref_cam(), 3.0) == doctest::Approx(3.0).epsilon(1e-15));
  CameraModel c{0.88, 0.88, 100, 100};
  CHECK(gsd_at(c, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // h·100·S_w/(f·I_w) with S_w = 1.32, f = 0.88, I_w = 5472
  CameraModel wide{1.32, 0.88, 5472, 3648};
  CHECK(gsd_at(wide, 20.0) == doctest::Approx(20.0 * 100.0 * 1.32 / (0.88 * 5472)).epsilon(1e-14));
  CHECK_THROWS_AS(gsd_at(ref_cam(), 0.0), Error);
  CHECK_THROWS_AS(gsd_at(ref_cam(), -1.0), Error);
}

TEST_CASE("altitude_for_gsd inverts gsd_at") {
  CHECK(altitude_for_gsd(ref_cam(), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(altitude_for_gsd(ref_cam(), 0.0), Error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(0.01, 50.0);
  const CameraModel cams[] = {ref_cam(), {1.32, 0.88, 5472, 3648}, {0.7, 1.6, 640, 480}};
  for (const auto& cam : cams) {
    for (int i = 0; i < 100; ++i) {
      const double v = g(rng);
      CHECK(std::abs(gsd_at(cam, altitude_for_gsd(cam, v)) - v) <= 1e-12 * v);
    }
  }
}

TEST_CASE("footprint") {
  const Waypoint w = make_waypoint(ref_cam(), 3.0, 4.0, 1.0);
  const GroundRect r = footprint(ref_cam(), w);
  CHECK(r.width() == doctest::Approx(1.0));
  CHECK(r.height() == doctest::Approx(1.0));
  CHECK(r.center_x() == doctest::Approx(3.0));
  CHECK(r.center_y() == doctest::Approx(4.0));

  const GroundRect r2 = footprint(ref_cam(), make_waypoint(ref_cam(), 3.0, 4.0, 2.0));
  CHECK(r2.width() == doctest::Approx(2.0 * r.width()));
  CHECK(r2.height() == doctest::Approx(2.0 * r.height()));

  CameraModel wide{1.0, 1.0, 100, 50};
  const GroundRect r3 = footprint(wide, make_waypoint(wide, 0, 0, 1.0));
  CHECK(r3.width() == doctest::Approx(2.0 * r3.height()));
}

TEST_CASE("lawnmower_waypoints: hand-derived grids") {
  const CameraModel cam = ref_cam();
  const double h50 = altitude_for_gsd(cam, 50.0);  // 50 m footprint
  SUBCASE("100 x 100 field, 50 m footprint") {
    const auto w = lawnmower_waypoints({0, 0, 100, 100}, cam, h50);
    REQUIRE(w.size() == 4);
    const double expect[4][2] = {{25, 25}, {75, 25}, {75, 75}, {25, 75}};
    for (int i = 0; i < 4; ++i) {
      CHECK(w[i].x == doctest::Approx(expect[i][0]));
      CHECK(w[i].y == doctest::Approx(expect[i][1]));
      CHECK(w[i].h == h50);
    }
  }
  SUBCASE("field smaller than one footprint") {
    const auto w = lawnmower_waypoints({10, 20, 40, 35}, cam, h50);
    REQUIRE(w.size() == 1);
    CHECK(w[0].x == doctest::Approx(25.0));
    CHECK(w[0].y == doctest::Approx(27.5));
  }
  SUBCASE("100 x 50 field") {
    const auto w = lawnmower_waypoints({0, 0, 100, 50}, cam, h50);
    REQUIRE(w.size() == 2);
    CHECK(w[0].y == doctest::Approx(w[1].y));
    CHECK(w[0].x < w[1].x);
  }
}

TEST_CASE("descent_waypoints") {
  const CameraModel cam = ref_cam();
  const Waypoint parent = make_waypoint(cam, 50, 50, 30.0);
  CHECK(descent_waypoints(parent, cam, 15.0).size() == 4);
  CHECK(descent_waypoints(parent, cam, 10.0).size() == 9);
  CHECK_THROWS_AS(descent_waypoints(parent, cam, 30.0), Error);
  CHECK_THROWS_AS(descent_waypoints(parent, cam, 40.0), Error);

  SUBCASE("starts at the corner nearest the parent and stays inside") {
    // Parent at the field corner; any entry corner is equidistant, the exit hint breaks the tie.
    const Waypoint corner = make_waypoint(cam, 15, 15, 30.0);
    const GroundRect pr = footprint(cam, corner);
    for (double hp : {15.0, 10.0, 7.0, 12.5}) {
      const auto subs = descent_waypoints(corner, cam, hp, Point3{100, 15, 30});
      for (const auto& s : subs) {
        const GroundRect r = footprint(cam, s);
        CHECK(r.min_x >= pr.min_x - 1e-9);
        CHECK(r.min_y >= pr.min_y - 1e-9);
        CHECK(r.max_x <= pr.max_x + 1e-9);
        CHECK(r.max_y <= pr.max_y + 1e-9);
        CHECK(s.h == hp);
      }
      // Exit toward +x: the last sub-waypoint is on the +x side.
      CHECK(subs.back().x >= corner.x - 1e-9);
    }
  }
}

TEST_CASE("lawnmower property: coverage, non-overlap, continuity (100 random fields)") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> L(3.0, 400.0), Hh(2.0, 60.0), off(-50.0, 50.0);
  const CameraModel cams[] = {ref_cam(), {1.0, 1.0, 120, 80}};
  int total = 0;
  for (const auto& cam : cams) {
    for (int t = 0; t < 50; ++t, ++total) {
      const double x0 = off(rng), y0 = off(rng);
      const GroundRect ext{x0, y0, x0 + L(rng), y0 + L(rng)};
      const double h = Hh(rng);
      const auto w = lawnmower_waypoints(ext, cam, h);
      const GroundRect f0 = footprint(cam, w.front());
      const int nx = cover_count(ext.width(), f0.width());
      const int ny = cover_count(ext.height(), f0.height());
      REQUIRE(w.size() == static_cast<std::size_t>(nx * ny));

      std::uniform_real_distribution<double> ux(ext.min_x, ext.max_x), uy(ext.min_y, ext.max_y);
      for (int k = 0; k < 200; ++k) CHECK(covered(w, cam, ux(rng), uy(rng)));
      for (double x : {ext.min_x, ext.max_x}) {
        for (double y : {ext.min_y, ext.max_y}) CHECK(covered(w, cam, x, y));
      }
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = i + 1; j < w.size(); ++j) {
          CHECK(overlap_area(footprint(cam, w[i]), footprint(cam, w[j])) <= 1e-9 * f0.width() * f0.height());
        }
      }
      for (std::size_t i = 1; i < w.size(); ++i) {
        const double dx = std::abs(w[i].x - w[i - 1].x), dy = std::abs(w[i].y - w[i - 1].y);
        const bool along_row = std::abs(dx - f0.width()) < 1e-9 && dy < 1e-9;
        const bool row_turn = dx < 1e-9 && std::abs(dy - f0.height()) < 1e-9;
        CHECK((along_row || row_turn));
      }
    }
  }
  CHECK(total == 100);
}

TEST_CASE("descent property: sub-grids stay within the parent footprint and cover it") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> H(5.0, 80.0), frac(0.1, 0.95), pos(-100, 100);
  const CameraModel cam{1.0, 1.0, 100, 60};
  for (int t = 0; t < 100; ++t) {
    const Waypoint parent = make_waypoint(cam, pos(rng), pos(rng), H(rng));
    const double hp = parent.h * frac(rng);
    const GroundRect pr = footprint(cam, parent);
    const Point3 exit{pos(rng), pos(rng), parent.h};
    const auto subs = descent_waypoints(parent, cam, hp, exit);
    const double tol = 1e-9 * pr.width();
    for (const auto& s : subs) {
      const GroundRect r = footprint(cam, s);
      CHECK(r.min_x >= pr.min_x - tol);
      CHECK(r.max_x <= pr.max_x + tol);
      CHECK(r.min_y >= pr.min_y - tol);
      CHECK(r.max_y <= pr.max_y + tol);
    }
    std::uniform_real_distribution<double> ux(pr.min_x, pr.max_x), uy(pr.min_y, pr.max_y);
    for (int k = 0; k < 50; ++k) CHECK(covered(subs, cam, ux(rng), uy(rng)));
    // Every grid corner is equally near the parent center, so the path starts
    // at a corner and the exit hint picks the one whose end is nearest the exit.
    double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
    for (const auto& s : subs) {
      lo_x = std::min(lo_x, s.x);
      hi_x = std::max(hi_x, s.x);
      lo_y = std::min(lo_y, s.y);
      hi_y = std::max(hi_y, s.y);
    }
    auto is_corner = [&](const Waypoint& s) {
      return (std::abs(s.x - lo_x) < tol || std::abs(s.x - hi_x) < tol) &&
             (std::abs(s.y - lo_y) < tol || std::abs(s.y - hi_y) < tol);
    };
    CHECK(is_corner(subs.front()));
    CHECK(is_corner(subs.back()));
    double nearest = INFINITY;
    for (double x : {lo_x, hi_x}) {
      for (double y : {lo_y, hi_y}) nearest = std::min(nearest, std::hypot(x - exit.x, y - exit.y));
    }
    CHECK(std::hypot(subs.back().x - exit.x, subs.back().y - exit.y) <= nearest + 1e-9);
  }
}

TEST_CASE("cover_count") {
  CHECK(cover_count(100, 50) == 2);
  CHECK(cover_count(100.0000000001, 50) == 2);
  CHECK(cover_count(101, 50) == 3);
  CHECK(cover_count(10, 50) == 1);
}
