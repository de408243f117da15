#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrplan/config.hpp"
#include "mrplan/decision.hpp"
#include "mrplan/report.hpp"

namespace mrplan {

enum class StrategyKind { Lawnmower, NonAdaptive, Adaptive, Linear };

struct Strategy {
  StrategyKind kind = StrategyKind::Lawnmower;
  double gsd = 0.0;  // lawnmower only

  std::string name() const;     // "lawnmower@5", "adaptive", ...
  std::string label() const;    // curve CSV strategy column
  std::string dirname() const;  // per-strategy output subdirectory
};

// "lawnmower@<gsd>", "non-adaptive", "adaptive" or "linear". Throws ConfigError.
Strategy parse_strategy(const std::string& s);

// Trains the decision model on the training map and writes it to config.model_path.
DecisionModel cmd_init_decision(const ExperimentConfig& config, std::ostream& log);

struct RunOutput {
  MissionResult mission;
  std::filesystem::path dir;
};

// Executes one mission on the test map and writes its artifacts under
// out_dir/<strategy dir>: trajectory.csv, images.csv, stitched.pgm (+ .json
// legend), stitched_gsd.pgm and summary.json. Adaptive runs also write the
// updated model as decision_model_after.json.
RunOutput cmd_run(const ExperimentConfig& config, const Strategy& strategy, const std::filesystem::path& out_dir,
                  std::ostream& log);

// Every candidate GSD as a lawnmower plus non-adaptive and adaptive, with
// curve.csv, accuracy_time.svg and paths.svg in out_dir.
std::vector<CurvePoint> cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                  std::ostream& log);

}  // namespace mrplan
