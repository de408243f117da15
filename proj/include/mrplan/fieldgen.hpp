#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrplan/worldmap.hpp"

namespace mrplan {

// Procedural crop field: bare soil with a few clustered vegetation patches.
// Inside a patch, crop plants and weeds are scattered as small discs a few
// pixels across, i.e. finer than a coarse survey GSD can resolve.
struct FieldSpec {
  double width_m = 200.0;
  double height_m = 200.0;
  double resolution_m = 0.05;
  int clusters = 6;
  int lobes_per_cluster = 3;
  double cluster_radius_min_m = 6.0;
  double cluster_radius_max_m = 12.0;
  double crop_cover = 0.35;  // disc area per patch area, before overlap
  double crop_radius_min_px = 1.0;
  double crop_radius_max_px = 2.5;
  double weed_cover = 0.10;
  double weed_radius_min_px = 0.6;
  double weed_radius_max_px = 1.5;
  std::uint64_t seed = 1;
};

// Legend: soil, crop, weed.
SemanticMap generate_field(const FieldSpec& spec);

// Fraction of non-void pixels labeled with any class in `classes`.
double class_fraction(const SemanticMap& map, const std::vector<Label>& classes);

}  // namespace mrplan
