#include "mrplan/planner.hpp"

#include <cmath>
#include <optional>

#include "mrplan/error.hpp"

namespace mrplan {

void Kinematics::validate() const {
  if (!(v_max > 0.0) || !(a_max > 0.0) || !(t_hover > 0.0)) {
    throw Error("kinematics v_max, a_max and t_hover must be strictly positive");
  }
}

double segment_time(const Point3& p, const Point3& q, const Kinematics& kin) {
  const double d = distance(p, q);
  if (d <= 0.0) return 0.0;
  if (d >= kin.v_max * kin.v_max / kin.a_max) return d / kin.v_max + kin.v_max / kin.a_max;
  return 2.0 * std::sqrt(d / kin.a_max);
}

const char* to_string(VisitAction a) {
  switch (a) {
    case VisitAction::Continue:
      return "continue";
    case VisitAction::Descend:
      return "descend";
    case VisitAction::Sub:
      return "sub";
  }
  return "continue";
}

namespace {

enum class Policy { Fixed, NonAdaptive, Adaptive, Linear };

class Mission {
public:
  Mission(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor, const Kinematics& kin,
          const InterestSet& interest, Policy policy)
      : map_(map), cam_(cam), sensor_(sensor), kin_(kin), interest_(interest), policy_(policy) {
    cam_.validate();
    kin_.validate();
    result_.stitched = StitchedMap::blank_like(map);
  }

  void set_model(DecisionModel* model) { model_ = model; }
  void set_linear(LinearPolicy p, double h_max, double h_min) {
    linear_ = p;
    lin_h_max_ = h_max;
    lin_h_min_ = h_min;
  }

  MissionResult run(double h_top) {
    const auto top = lawnmower_waypoints(map_.extent(), cam_, h_top);
    for (std::size_t i = 0; i < top.size(); ++i) {
      std::optional<Point3> next;
      if (i + 1 < top.size()) next = top[i + 1].position();
      const std::size_t rec = visit(top[i], VisitAction::Continue, 0);
      maybe_descend(rec, 0, next);
    }
    finish();
    return std::move(result_);
  }

private:
  // Captures, stitches and scores one image. Returns the record index.
  std::size_t visit(const Waypoint& wp, VisitAction action, int depth) {
    VisitRecord r;
    r.wp = wp;
    r.action = action;
    r.depth = depth;
    if (result_.visits.empty()) {
      r.arrival_t = 0.0;
    } else {
      const VisitRecord& prev = result_.visits.back();
      r.arrival_t = prev.arrival_t + kin_.t_hover + segment_time(prev.wp.position(), wp.position(), kin_);
    }
    const Observation obs = sensor_.capture(map_, cam_, wp);
    stitch(result_.stitched, obs);
    last_counts_ = semantic_counts(obs.labels, interest_);
    r.sigma_valid = last_counts_.valid > 0;
    r.sigma = r.sigma_valid ? last_counts_.ratio() : 0.0;
    r.miou = miou(observation_confusion(map_, obs), interest_);
    result_.visits.push_back(std::move(r));
    return result_.visits.size() - 1;
  }

  std::optional<double> choose_descent(const VisitRecord& r, int depth) const {
    if (!r.sigma_valid) return std::nullopt;
    switch (policy_) {
      case Policy::Fixed:
        return std::nullopt;
      case Policy::Linear: {
        if (depth > 0) return std::nullopt;
        const double target = linear_.target_altitude(r.sigma, lin_h_max_, lin_h_min_);
        if (target < r.wp.h - 1e-9) return target;
        return std::nullopt;
      }
      case Policy::NonAdaptive:
      case Policy::Adaptive: {
        const Decision d = decide(*model_, r.sigma, r.wp.h, depth);
        if (d.descend()) return d.altitude;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void maybe_descend(std::size_t rec_index, int depth, std::optional<Point3> exit_toward) {
    const auto target = choose_descent(result_.visits[rec_index], depth);
    if (!target) return;
    result_.visits[rec_index].action = VisitAction::Descend;
    const Waypoint parent = result_.visits[rec_index].wp;
    const double sigma_high = result_.visits[rec_index].sigma;

    const auto subs = descent_waypoints(parent, cam_, *target, exit_toward);
    RatioCounts pooled;
    for (std::size_t k = 0; k < subs.size(); ++k) {
      const std::size_t rec = visit(subs[k], VisitAction::Sub, depth + 1);
      pooled += last_counts_;
      std::optional<Point3> next = exit_toward;
      if (k + 1 < subs.size()) next = subs[k + 1].position();
      maybe_descend(rec, depth + 1, next);
    }
    ++result_.descent_events;
    if (policy_ == Policy::Adaptive && pooled.valid > 0) {
      update_online(*model_, sigma_high, pooled.ratio(), parent.h - *target);
    }
  }

  void finish() {
    result_.total_time = result_.visits.empty() ? 0.0 : result_.visits.back().arrival_t + kin_.t_hover;
    result_.field = miou(confusion(result_.stitched.labels, map_.labels(), map_.num_classes()), interest_);
    result_.field_miou = result_.field.value;
  }

  const SemanticMap& map_;
  const CameraModel& cam_;
  const Sensor& sensor_;
  const Kinematics& kin_;
  const InterestSet& interest_;
  Policy policy_;
  DecisionModel* model_ = nullptr;
  LinearPolicy linear_;
  double lin_h_max_ = 0.0;
  double lin_h_min_ = 0.0;
  RatioCounts last_counts_;
  MissionResult result_;
};

}  // namespace

MissionResult run_fixed_lawnmower(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor, double h,
                                  const Kinematics& kin, const InterestSet& interest) {
  Mission m(map, cam, sensor, kin, interest, Policy::Fixed);
  return m.run(h);
}

MissionResult run_non_adaptive(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor,
                               const DecisionModel& model, const Kinematics& kin, const InterestSet& interest) {
  DecisionModel frozen = model;
  Mission m(map, cam, sensor, kin, interest, Policy::NonAdaptive);
  m.set_model(&frozen);
  return m.run(model.h_max());
}

AdaptiveRun run_adaptive(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor, DecisionModel model,
                         const Kinematics& kin, const InterestSet& interest) {
  Mission m(map, cam, sensor, kin, interest, Policy::Adaptive);
  m.set_model(&model);
  MissionResult mission = m.run(model.h_max());
  return AdaptiveRun{std::move(mission), std::move(model)};
}

MissionResult run_linear(const SemanticMap& map, const CameraModel& cam, const Sensor& sensor,
                         const LinearPolicy& policy, double h_max, double h_min, const Kinematics& kin,
                         const InterestSet& interest) {
  if (!(h_min > 0.0) || !(h_min < h_max)) throw Error("linear policy needs 0 < h_min < h_max");
  Mission m(map, cam, sensor, kin, interest, Policy::Linear);
  m.set_linear(policy, h_max, h_min);
  return m.run(h_max);
}

}  // namespace mrplan
