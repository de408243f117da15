#include "mrplan/fieldgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mrplan/error.hpp"

namespace mrplan {

namespace {

constexpr Label kSoil = 0;
constexpr Label kCrop = 1;
constexpr Label kWeed = 2;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

struct Disc {
  double cx, cy, r;  // pixels
};

void paint_disc(LabelGrid& grid, const Disc& d, Label l) {
  const int r0 = std::max(0, static_cast<int>(std::floor(d.cy - d.r)));
  const int r1 = std::min(grid.height - 1, static_cast<int>(std::ceil(d.cy + d.r)));
  const int c0 = std::max(0, static_cast<int>(std::floor(d.cx - d.r)));
  const int c1 = std::min(grid.width - 1, static_cast<int>(std::ceil(d.cx + d.r)));
  const double r2 = d.r * d.r;
  for (int r = r0; r <= r1; ++r) {
    const double dy = r + 0.5 - d.cy;
    for (int c = c0; c <= c1; ++c) {
      const double dx = c + 0.5 - d.cx;
      if (dx * dx + dy * dy <= r2) grid.at(r, c) = l;
    }
  }
}

bool in_any(const std::vector<Disc>& lobes, double x, double y) {
  for (const auto& d : lobes) {
    if ((x - d.cx) * (x - d.cx) + (y - d.cy) * (y - d.cy) <= d.r * d.r) return true;
  }
  return false;
}

void scatter(LabelGrid& grid, std::mt19937_64& rng, const std::vector<Disc>& lobes, double patch_area_px, double cover,
             double rmin, double rmax, Label l) {
  if (cover <= 0.0) return;
  const double mean_r2 = (rmin * rmin + rmin * rmax + rmax * rmax) / 3.0;
  const auto count = static_cast<long>(std::llround(cover * patch_area_px / (std::numbers::pi * mean_r2)));
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& d : lobes) {
    x0 = std::min(x0, d.cx - d.r);
    y0 = std::min(y0, d.cy - d.r);
    x1 = std::max(x1, d.cx + d.r);
    y1 = std::max(y1, d.cy + d.r);
  }
  for (long placed = 0, tries = 0; placed < count && tries < 50 * count; ++tries) {
    const double x = uniform(rng, x0, x1);
    const double y = uniform(rng, y0, y1);
    if (!in_any(lobes, x, y)) continue;
    paint_disc(grid, {x, y, uniform(rng, rmin, rmax)}, l);
    ++placed;
  }
}

}  // namespace

SemanticMap generate_field(const FieldSpec& spec) {
  if (!(spec.resolution_m > 0.0) || !(spec.width_m > 0.0) || !(spec.height_m > 0.0)) {
    throw Error("field spec needs positive size and resolution");
  }
  const int w = std::max(1, static_cast<int>(std::lround(spec.width_m / spec.resolution_m)));
  const int h = std::max(1, static_cast<int>(std::lround(spec.height_m / spec.resolution_m)));
  LabelGrid grid(w, h, kSoil);
  std::mt19937_64 rng(spec.seed);
  const double px_per_m = 1.0 / spec.resolution_m;

  for (int k = 0; k < spec.clusters; ++k) {
    const double rmax = spec.cluster_radius_max_m * px_per_m;
    const double cx = uniform(rng, rmax, w - rmax);
    const double cy = uniform(rng, rmax, h - rmax);
    std::vector<Disc> lobes;
    for (int j = 0; j < std::max(1, spec.lobes_per_cluster); ++j) {
      const double r = uniform(rng, spec.cluster_radius_min_m, spec.cluster_radius_max_m) * px_per_m;
      const double off = j == 0 ? 0.0 : uniform(rng, 0.3, 0.8) * r;
      const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      lobes.push_back({cx + off * std::cos(ang), cy + off * std::sin(ang), r});
    }
    double area = 0.0;
    for (const auto& d : lobes) area += std::numbers::pi * d.r * d.r;
    area *= 0.7;  // lobes overlap
    scatter(grid, rng, lobes, area, spec.crop_cover, spec.crop_radius_min_px, spec.crop_radius_max_px, kCrop);
    scatter(grid, rng, lobes, area, spec.weed_cover, spec.weed_radius_min_px, spec.weed_radius_max_px, kWeed);
  }
  return SemanticMap(std::move(grid), spec.resolution_m, {"soil", "crop", "weed"});
}

double class_fraction(const SemanticMap& map, const std::vector<Label>& classes) {
  std::uint64_t hit = 0, valid = 0;
  for (Label l : map.labels().data) {
    if (l == kVoidLabel) continue;
    ++valid;
    if (std::find(classes.begin(), classes.end(), l) != classes.end()) ++hit;
  }
  return valid ? static_cast<double>(hit) / static_cast<double>(valid) : 0.0;
}

}  // namespace mrplan
