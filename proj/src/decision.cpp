#include "mrplan/decision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "mrplan/error.hpp"

namespace mrplan {

using nlohmann::json;

namespace {

std::vector<double> xs_of(const std::vector<DeltaPair>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(p.x);
  return out;
}

std::vector<double> ys_of(const std::vector<DeltaPair>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(p.y);
  return out;
}

std::vector<DeltaPair> pairs_of(const GpModel& gp) {
  std::vector<DeltaPair> out;
  for (std::size_t i = 0; i < gp.size(); ++i) out.push_back({gp.inputs()[i], gp.targets()[i]});
  return out;
}

Hyperparams fit_or_default(const std::vector<DeltaPair>& set, const HyperBounds& bounds) {
  if (set.size() < 3) return Hyperparams{};
  const auto x = xs_of(set);
  const auto y = ys_of(set);
  return fit_hyperparams(x, y, bounds).theta;
}

void check_altitudes(const std::vector<double>& altitudes) {
  if (altitudes.size() < 2) throw Error("decision model needs at least two candidate altitudes");
  for (std::size_t i = 0; i < altitudes.size(); ++i) {
    if (!(altitudes[i] > 0.0) || !std::isfinite(altitudes[i])) throw Error("candidate altitudes must be positive");
    if (i > 0 && !(altitudes[i] < altitudes[i - 1])) throw Error("candidate altitudes must be strictly decreasing");
  }
}

std::size_t altitude_index(const std::vector<double>& altitudes, double h) {
  for (std::size_t i = 0; i < altitudes.size(); ++i) {
    if (std::abs(altitudes[i] - h) <= 1e-9 * std::max(1.0, altitudes[i])) return i;
  }
  throw Error("altitude " + std::to_string(h) + " is not a candidate altitude");
}

json pairs_json(const std::vector<DeltaPair>& v) {
  json a = json::array();
  for (const auto& p : v) a.push_back({p.x, p.y});
  return a;
}

std::vector<DeltaPair> pairs_from_json(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(std::string("decision model lacks the '") + name + "' set");
  const json& a = j[name];
  if (!a.is_array()) throw Error(std::string("decision model set '") + name + "' must be an array");
  std::vector<DeltaPair> out;
  for (const auto& row : a) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw Error(std::string("decision model set '") + name + "' must hold [x, y] number pairs");
    }
    out.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return out;
}

}  // namespace

ObservationSets DecisionModel::sets() const { return {pairs_of(gp_O), pairs_of(gp_I), pairs_of(gp_S)}; }

void DecisionModel::validate() const {
  check_altitudes(altitudes);
  if (!(tau_gain >= 0.0)) throw Error("tau_gain must be non-negative");
  if (max_depth < 0) throw Error("max_depth must be non-negative");
}

DecisionModel empty_decision_model(std::vector<double> altitudes, double tau_gain, int max_depth) {
  DecisionModel m;
  m.altitudes = std::move(altitudes);
  m.tau_gain = tau_gain;
  m.max_depth = max_depth;
  m.validate();
  return m;
}

DecisionModel assemble_decision_model(const ObservationSets& sets, const Hyperparams& theta_O,
                                      const Hyperparams& theta_I, const Hyperparams& theta_S,
                                      std::vector<double> altitudes, double tau_gain, int max_depth) {
  DecisionModel m;
  m.gp_O = GpModel(xs_of(sets.O), ys_of(sets.O), theta_O);
  m.gp_I = GpModel(xs_of(sets.I), ys_of(sets.I), theta_I);
  m.gp_S = GpModel(xs_of(sets.S), ys_of(sets.S), theta_S);
  m.altitudes = std::move(altitudes);
  m.tau_gain = tau_gain;
  m.max_depth = max_depth;
  m.validate();
  return m;
}

DecisionModel initialize_decision(const SemanticMap& training_map, const CameraModel& cam, const Sensor& sensor,
                                  std::vector<double> altitudes, const InterestSet& interest,
                                  const InitOptions& options) {
  check_altitudes(altitudes);
  const double h_max = altitudes.front();
  const GroundRect extent = training_map.extent();
  const GroundRect fp = footprint(cam, make_waypoint(cam, 0.0, 0.0, h_max));
  if (extent.width() < fp.width() || extent.height() < fp.height()) {
    throw Error("training field is smaller than one camera footprint at h_max");
  }

  ObservationSets sets;
  const auto regions = lawnmower_waypoints(extent, cam, h_max);
  for (const Waypoint& w : regions) {
    const Observation high = sensor.capture(training_map, cam, w);
    const RatioCounts high_counts = semantic_counts(high.labels, interest);
    if (high_counts.valid == 0) continue;
    const double sigma_high = high_counts.ratio();
    const double miou_high = miou(observation_confusion(training_map, high), interest).value;

    for (std::size_t k = 1; k < altitudes.size(); ++k) {
      const double h_low = altitudes[k];
      RatioCounts low_counts;
      ConfusionMatrix low_cm(training_map.num_classes());
      for (const Waypoint& sub : descent_waypoints(w, cam, h_low)) {
        const Observation o = sensor.capture(training_map, cam, sub);
        low_counts += semantic_counts(o.labels, interest);
        low_cm += observation_confusion(training_map, o);
      }
      if (low_counts.valid == 0) continue;
      const double dsigma = sigma_high - low_counts.ratio();
      const double dmiou = miou_high - miou(low_cm, interest).value;
      sets.O.push_back({dsigma, h_max - h_low});
      sets.I.push_back({dsigma, dmiou});
      sets.S.push_back({sigma_high, dsigma});
    }
  }
  if (sets.O.empty()) throw Error("training field is entirely void");

  return assemble_decision_model(sets, fit_or_default(sets.O, options.bounds), fit_or_default(sets.I, options.bounds),
                                 fit_or_default(sets.S, options.bounds), std::move(altitudes), options.tau_gain,
                                 options.max_depth);
}

Decision decide(const DecisionModel& model, double sigma, double h, int depth) {
  const std::size_t idx = altitude_index(model.altitudes, h);
  Decision d;
  if (idx + 1 >= model.altitudes.size() || depth >= model.max_depth) return d;

  d.predicted_dsigma = model.gp_S.mean(sigma);
  // ΔmIoU = mIoU_high - mIoU_low, so descending gains its negation.
  d.predicted_gain = -model.gp_I.mean(d.predicted_dsigma);
  if (!(d.predicted_gain >= model.tau_gain)) return d;

  d.predicted_dh = model.gp_O.mean(d.predicted_dsigma);
  const double next_below = model.altitudes[idx + 1];
  const double target = std::clamp(h - d.predicted_dh, model.h_min(), next_below);
  double best = next_below;
  for (std::size_t k = idx + 1; k < model.altitudes.size(); ++k) {
    // Ties resolve toward the lower altitude.
    if (std::abs(model.altitudes[k] - target) <= std::abs(best - target)) best = model.altitudes[k];
  }
  d.kind = DecisionKind::Descend;
  d.altitude = best;
  return d;
}

void update_online(DecisionModel& model, double sigma_high, double sigma_low, double dh) {
  if (!(dh > 0.0)) throw Error("online update needs a positive altitude change");
  const double dsigma = sigma_high - sigma_low;
  model.gp_O = add_observation(model.gp_O, dsigma, dh);
  model.gp_S = add_observation(model.gp_S, sigma_high, dsigma);
}

json to_json(const DecisionModel& model) {
  const auto sets = model.sets();
  json j;
  j["version"] = kDecisionModelVersion;
  j["O"] = pairs_json(sets.O);
  j["I"] = pairs_json(sets.I);
  j["S"] = pairs_json(sets.S);
  j["theta_O"] = to_json(model.gp_O.theta());
  j["theta_I"] = to_json(model.gp_I.theta());
  j["theta_S"] = to_json(model.gp_S.theta());
  j["tau_gain"] = std::isfinite(model.tau_gain) ? json(model.tau_gain) : json("inf");
  j["altitudes"] = model.altitudes;
  j["max_depth"] = model.max_depth == kUnboundedDepth ? json(nullptr) : json(model.max_depth);
  return j;
}

DecisionModel decision_model_from_json(const json& j) {
  if (!j.is_object()) throw Error("decision model must be a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer()) throw Error("decision model lacks a version");
  if (j["version"].get<int>() != kDecisionModelVersion) {
    throw Error("unsupported decision model version " + j["version"].dump() + " (expected " +
                std::to_string(kDecisionModelVersion) + ")");
  }
  ObservationSets sets{pairs_from_json(j, "O"), pairs_from_json(j, "I"), pairs_from_json(j, "S")};
  for (const char* key : {"theta_O", "theta_I", "theta_S", "tau_gain", "altitudes"}) {
    if (!j.contains(key)) throw Error(std::string("decision model lacks '") + key + "'");
  }
  double tau = 0.0;
  if (j["tau_gain"].is_number()) {
    tau = j["tau_gain"].get<double>();
  } else if (j["tau_gain"] == "inf") {
    tau = std::numeric_limits<double>::infinity();
  } else {
    throw Error("decision model tau_gain must be a number or \"inf\"");
  }
  int depth = kUnboundedDepth;
  if (j.contains("max_depth") && !j["max_depth"].is_null()) {
    if (!j["max_depth"].is_number_integer()) throw Error("decision model max_depth must be an integer or null");
    depth = j["max_depth"].get<int>();
  }
  std::vector<double> altitudes;
  try {
    altitudes = j["altitudes"].get<std::vector<double>>();
  } catch (const json::exception&) {
    throw Error("decision model altitudes must be an array of numbers");
  }
  return assemble_decision_model(sets, hyperparams_from_json(j["theta_O"]), hyperparams_from_json(j["theta_I"]),
                                 hyperparams_from_json(j["theta_S"]), std::move(altitudes), tau, depth);
}

void save_decision_model(const DecisionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write decision model to " + path.string());
  out << to_json(model).dump(2) << '\n';
}

DecisionModel load_decision_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open decision model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("malformed decision model " + path.string() + ": " + e.what());
  }
  return decision_model_from_json(j);
}

double LinearPolicy::target_altitude(double sigma, double h_max, double h_min) const {
  const double span = sigma_high - sigma_low;
  const double t = span > 0.0 ? std::clamp((sigma - sigma_low) / span, 0.0, 1.0) : (sigma >= sigma_high ? 1.0 : 0.0);
  return h_max - (h_max - h_min) * t;
}

}  // namespace mrplan
