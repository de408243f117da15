#pragma once

#include <filesystem>
#include <limits>
#include <vector>

#include <json.hpp>

#include "mrplan/camera.hpp"
#include "mrplan/gp.hpp"
#include "mrplan/metrics.hpp"
#include "mrplan/sensor.hpp"

namespace mrplan {

inline constexpr int kUnboundedDepth = std::numeric_limits<int>::max();
inline constexpr int kDecisionModelVersion = 1;

struct DeltaPair {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const DeltaPair&) const = default;
};

// O: (Δσ, Δh), I: (Δσ, ΔmIoU), S: (σ at h_max, Δσ). Every Δ is the value at
// the higher altitude minus the value at the lower one.
struct ObservationSets {
  std::vector<DeltaPair> O;
  std::vector<DeltaPair> I;
  std::vector<DeltaPair> S;
};

struct DecisionModel {
  GpModel gp_O;
  GpModel gp_I;
  GpModel gp_S;
  double tau_gain = 0.02;
  std::vector<double> altitudes;  // strictly decreasing, h_max first
  int max_depth = kUnboundedDepth;

  double h_max() const { return altitudes.front(); }
  double h_min() const { return altitudes.back(); }
  ObservationSets sets() const;
  void validate() const;
};

DecisionModel empty_decision_model(std::vector<double> altitudes, double tau_gain = 0.02,
                                   int max_depth = kUnboundedDepth);

// Rebuilds the three regressors from explicit sets with fixed hyperparameters.
DecisionModel assemble_decision_model(const ObservationSets& sets, const Hyperparams& theta_O,
                                      const Hyperparams& theta_I, const Hyperparams& theta_S,
                                      std::vector<double> altitudes, double tau_gain, int max_depth);

struct InitOptions {
  double tau_gain = 0.02;
  int max_depth = kUnboundedDepth;
  HyperBounds bounds;
};

// Flies every top-level region of a ground-truthed training field at h_max and
// at each lower candidate, records the O/I/S pairs and fits all three GPs.
DecisionModel initialize_decision(const SemanticMap& training_map, const CameraModel& cam, const Sensor& sensor,
                                  std::vector<double> altitudes, const InterestSet& interest,
                                  const InitOptions& options = {});

enum class DecisionKind { Continue, Descend };

struct Decision {
  DecisionKind kind = DecisionKind::Continue;
  double altitude = 0.0;  // target when descending
  double predicted_dsigma = 0.0;
  double predicted_gain = 0.0;
  double predicted_dh = 0.0;

  bool descend() const { return kind == DecisionKind::Descend; }
};

// sigma: semantic ratio observed at altitude h (a member of model.altitudes).
// depth: number of descents already nested above this waypoint.
Decision decide(const DecisionModel& model, double sigma, double h, int depth = 0);

// Records one executed descent: (σ_high - σ_low, dh) into O and
// (σ_high, σ_high - σ_low) into S. I and all hyperparameters are unchanged.
void update_online(DecisionModel& model, double sigma_high, double sigma_low, double dh);

nlohmann::json to_json(const DecisionModel& model);
DecisionModel decision_model_from_json(const nlohmann::json& j);
void save_decision_model(const DecisionModel& model, const std::filesystem::path& path);
DecisionModel load_decision_model(const std::filesystem::path& path);

// Affine σ → altitude map between h_max (σ ≤ sigma_low) and h_min (σ ≥ sigma_high),
// used as the thresholdless comparison policy.
struct LinearPolicy {
  double sigma_low = 0.0;
  double sigma_high = 1.0;

  double target_altitude(double sigma, double h_max, double h_min) const;
};

}  // namespace mrplan
