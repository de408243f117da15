#include "mrplan/commands.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "mrplan/error.hpp"

namespace mrplan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::Lawnmower: return "lawnmower@" + format_number(gsd);
    case StrategyKind::NonAdaptive: return "non-adaptive";
    case StrategyKind::Adaptive: return "adaptive";
    case StrategyKind::Linear: return "linear";
  }
  return "";
}

std::string Strategy::label() const { return kind == StrategyKind::Lawnmower ? "lawnmower" : name(); }

std::string Strategy::dirname() const {
  return kind == StrategyKind::Lawnmower ? "lawnmower_" + format_number(gsd) : name();
}

Strategy parse_strategy(const std::string& s) {
  if (s == "non-adaptive") return {StrategyKind::NonAdaptive, 0.0};
  if (s == "adaptive") return {StrategyKind::Adaptive, 0.0};
  if (s == "linear") return {StrategyKind::Linear, 0.0};
  const std::string prefix = "lawnmower@";
  if (s.rfind(prefix, 0) == 0) {
    const std::string num = s.substr(prefix.size());
    std::size_t used = 0;
    double g = 0.0;
    try {
      g = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == num.size() && used > 0 && g > 0.0 && std::isfinite(g)) return {StrategyKind::Lawnmower, g};
    throw ConfigError("bad lawnmower GSD in strategy '" + s + "'");
  }
  throw ConfigError("unknown strategy '" + s + "' (expected lawnmower@<gsd>, non-adaptive, adaptive or linear)");
}

namespace {

SemanticMap load(const MapPaths& m) { return load_map(m.raster, m.legend); }

DecisionModel require_model(const ExperimentConfig& c) {
  if (!fs::exists(c.model_path)) {
    throw Error("decision model " + c.model_path.string() + " not found: run init-decision first");
  }
  DecisionModel model = load_decision_model(c.model_path);
  // The mission follows the current config's candidates and thresholds only
  // through the model, so a stale model is refused rather than silently used.
  if (model.altitudes.size() != c.altitudes.size()) {
    throw Error("decision model " + c.model_path.string() +
                " was trained for different altitude candidates: rerun init-decision");
  }
  for (std::size_t i = 0; i < c.altitudes.size(); ++i) {
    if (std::abs(model.altitudes[i] - c.altitudes[i]) > 1e-9 * c.altitudes[i]) {
      throw Error("decision model " + c.model_path.string() +
                  " was trained for different altitude candidates: rerun init-decision");
    }
  }
  model.tau_gain = c.tau_gain;
  model.max_depth = c.max_depth;
  return model;
}

// Loaded once per command and shared by every mission it runs.
struct TestContext {
  const ExperimentConfig& config;
  SemanticMap map;
  InterestSet interest;
  std::unique_ptr<Sensor> sensor;
  std::optional<DecisionModel> model;

  explicit TestContext(const ExperimentConfig& c)
      : config(c), map(load(c.test_map)), interest(interest_set(c, map)), sensor(make_sensor(c, map, false)) {}

  const DecisionModel& decision_model() {
    if (!model) model = require_model(config);
    return *model;
  }
};

struct StrategyResult {
  MissionResult mission;
  std::optional<DecisionModel> updated;
};

StrategyResult execute(TestContext& ctx, const Strategy& s) {
  const ExperimentConfig& c = ctx.config;
  switch (s.kind) {
    case StrategyKind::Lawnmower:
      return {run_fixed_lawnmower(ctx.map, c.camera, *ctx.sensor, altitude_for_gsd(c.camera, s.gsd), c.kinematics,
                                  ctx.interest),
              std::nullopt};
    case StrategyKind::NonAdaptive:
      return {run_non_adaptive(ctx.map, c.camera, *ctx.sensor, ctx.decision_model(), c.kinematics, ctx.interest),
              std::nullopt};
    case StrategyKind::Adaptive: {
      AdaptiveRun r = run_adaptive(ctx.map, c.camera, *ctx.sensor, ctx.decision_model(), c.kinematics, ctx.interest);
      return {std::move(r.mission), std::move(r.model)};
    }
    case StrategyKind::Linear:
      return {run_linear(ctx.map, c.camera, *ctx.sensor, c.linear, c.altitudes.front(), c.altitudes.back(),
                         c.kinematics, ctx.interest),
              std::nullopt};
  }
  throw Error("unhandled strategy");
}

fs::path write_artifacts(const TestContext& ctx, const Strategy& s, const StrategyResult& r, const fs::path& out_dir,
                         const json& resolved) {
  const fs::path dir = out_dir / s.dirname();
  fs::create_directories(dir);
  write_trajectory_csv(dir / "trajectory.csv", r.mission);
  write_images_csv(dir / "images.csv", r.mission, ctx.map.legend(), ctx.interest);
  write_stitched(r.mission.stitched, dir / "stitched.pgm", dir / "stitched.json", dir / "stitched_gsd.pgm");
  write_json(dir / "summary.json", mission_summary(r.mission, s.name(), ctx.config.seed, resolved));
  if (r.updated) save_decision_model(*r.updated, dir / "decision_model_after.json");
  return dir;
}

json resolved_config(const ExperimentConfig& c, const fs::path& out_dir) {
  ExperimentConfig copy = c;
  copy.output_dir = fs::absolute(out_dir).lexically_normal();
  return config_to_json(copy);
}

void log_mission(std::ostream& log, const Strategy& s, const MissionResult& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-16s time %9.1f s  field mIoU %.4f  waypoints %zu  descents %d\n", s.name().c_str(),
                m.total_time, m.field_miou, m.visits.size(), m.descent_events);
  log << buf;
}

}  // namespace

DecisionModel cmd_init_decision(const ExperimentConfig& c, std::ostream& log) {
  const SemanticMap train = load(c.train_map);
  const InterestSet interest = interest_set(c, train);
  const auto sensor = make_sensor(c, train, true);
  InitOptions opts;
  opts.tau_gain = c.tau_gain;
  opts.max_depth = c.max_depth;
  opts.bounds = c.gp_bounds;
  DecisionModel model = initialize_decision(train, c.camera, *sensor, c.altitudes, interest, opts);
  if (!c.model_path.parent_path().empty()) fs::create_directories(c.model_path.parent_path());
  save_decision_model(model, c.model_path);

  const ObservationSets sets = model.sets();
  log << "decision model written to " << c.model_path.string() << '\n';
  log << "|O| = " << sets.O.size() << "  |I| = " << sets.I.size() << "  |S| = " << sets.S.size() << '\n';
  auto theta = [&](const char* name, const GpModel& gp) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: length_scale %.6g  signal_var %.6g  noise_var %.6g\n", name,
                  gp.theta().length_scale, gp.theta().signal_var, gp.theta().noise_var);
    log << buf;
  };
  theta("gp_O", model.gp_O);
  theta("gp_I", model.gp_I);
  theta("gp_S", model.gp_S);
  return model;
}

RunOutput cmd_run(const ExperimentConfig& c, const Strategy& s, const fs::path& out_dir, std::ostream& log) {
  TestContext ctx(c);
  StrategyResult r = execute(ctx, s);
  const fs::path dir = write_artifacts(ctx, s, r, out_dir, resolved_config(c, out_dir));
  log_mission(log, s, r.mission);
  return {std::move(r.mission), dir};
}

std::vector<CurvePoint> cmd_sweep(const ExperimentConfig& c, const fs::path& out_dir, std::ostream& log) {
  TestContext ctx(c);
  ctx.decision_model();  // fail before flying anything
  const json resolved = resolved_config(c, out_dir);

  std::vector<Strategy> strategies;
  for (double g : c.gsds()) strategies.push_back({StrategyKind::Lawnmower, g});
  strategies.push_back({StrategyKind::NonAdaptive, 0.0});
  strategies.push_back({StrategyKind::Adaptive, 0.0});

  const double g_top = gsd_at(c.camera, c.altitudes.front());
  std::vector<CurvePoint> points;
  std::vector<MissionResult> missions;
  for (const Strategy& s : strategies) {
    StrategyResult r = execute(ctx, s);
    write_artifacts(ctx, s, r, out_dir, resolved);
    log_mission(log, s, r.mission);
    const double g = s.kind == StrategyKind::Lawnmower ? s.gsd : g_top;
    points.push_back({s.label(), g, r.mission.total_time, r.mission.field_miou});
    missions.push_back(std::move(r.mission));
  }

  fs::create_directories(out_dir);
  write_curve_csv(out_dir / "curve.csv", points);
  write_scatter_svg(out_dir / "accuracy_time.svg", points);
  std::vector<PathPanel> panels;
  for (std::size_t i = 0; i < strategies.size(); ++i) panels.push_back({strategies[i].name(), &missions[i]});
  write_paths_svg(out_dir / "paths.svg", panels, ctx.map.extent(), c.altitudes.back(), c.altitudes.front());
  return points;
}

}  // namespace mrplan
