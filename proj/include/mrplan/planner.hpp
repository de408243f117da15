#pragma once

#include <optional>
#include <vector>

#include "mrplan/camera.hpp"
#include "mrplan/decision.hpp"
#include "mrplan/metrics.hpp"
#include "mrplan/sensor.hpp"
#include "mrplan/worldmap.hpp"

namespace mrplan {

// Rest-to-rest point motion: the vehicle stops at every waypoint.
struct Kinematics {
  double v_max = 5.0;    // m/s
  double a_max = 2.5;    // m/s²
  double t_hover = 2.0;  // s spent per waypoint on segmentation and planning

  void validate() const;
};

// Trapezoidal (or triangular, for short hops) velocity profile over the
// straight-line distance between p and q.
double segment_time(const Point3& p, const Point3& q, const Kinematics& kin);

enum class VisitAction { Continue, Descend, Sub };

const char* to_string(VisitAction a);

// One executed waypoint and the image captured there.
struct VisitRecord {
  Waypoint wp;
  double arrival_t = 0.0;
  VisitAction action = VisitAction::Continue;
  int depth = 0;  // 0 for the top-level coverage path
  double sigma = 0.0;
  bool sigma_valid = false;
  MiouResult miou;
};

struct MissionResult {
  std::vector<VisitRecord> visits;
  StitchedMap stitched;
  MiouResult field;
  double field_miou = 0.0;
  double total_time = 0.0;
  int descent_events = 0;
};

MissionResult run_fixed_lawnmower(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor, double h,
                                  const Kinematics& kin, const InterestSet& interest);

// Follows the initialized decision model without ever updating it.
MissionResult run_non_adaptive(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor,
                               const DecisionModel& model, const Kinematics& kin, const InterestSet& interest);

struct AdaptiveRun {
  MissionResult mission;
  DecisionModel model;  // after all online updates
};

AdaptiveRun run_adaptive(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor, DecisionModel model,
                         const Kinematics& kin, const InterestSet& interest);

// Thresholdless comparison policy: at each top-level waypoint descend once to
// the altitude the affine σ map names, whenever it is below h_max.
MissionResult run_linear(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor,
                         const LinearPolicy& policy, double h_max, double h_min, const Kinematics& kin,
                         const InterestSet& interest);

}  // namespace mrplan
