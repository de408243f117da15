// Command-line front end: init-decision, run, sweep and make-field.
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mrplan/commands.hpp"
#include "mrplan/error.hpp"
#include "mrplan/fieldgen.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& opts) {
  cmd->add_option("--config", opts.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out, "override the output directory");
}

mrplan::ExperimentConfig resolve(const Common& opts) {
  mrplan::ExperimentConfig c = mrplan::load_config(opts.config);
  if (opts.seed) c.seed = *opts.seed;
  if (!opts.out.empty()) {
    const auto old_default = c.output_dir / "decision_model.json";
    c.output_dir = std::filesystem::absolute(opts.out).lexically_normal();
    // A model path that was only defaulted follows the output directory.
    if (c.model_path == old_default) c.model_path = c.output_dir / "decision_model.json";
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-resolution UAV mapping simulator"};
  app.require_subcommand(1);

  Common init_opts, run_opts, sweep_opts;
  std::string strategy;
  auto* init = app.add_subcommand("init-decision", "train the decision model on the training field");
  add_common(init, init_opts);
  auto* run = app.add_subcommand("run", "fly one strategy over the test field");
  add_common(run, run_opts);
  run->add_option("--strategy", strategy, "lawnmower@<gsd>, non-adaptive, adaptive or linear")->required();
  auto* sweep = app.add_subcommand("sweep", "all lawnmower GSDs, non-adaptive and adaptive, with plots");
  add_common(sweep, sweep_opts);

  mrplan::FieldSpec field;
  std::string field_out;
  auto* make_field = app.add_subcommand("make-field", "write a procedural crop field as PGM + legend JSON");
  make_field->add_option("--out", field_out, "raster path (.pgm); the legend goes next to it")->required();
  make_field->add_option("--seed", field.seed, "generator seed");
  make_field->add_option("--width", field.width_m, "field width [m]");
  make_field->add_option("--height", field.height_m, "field height [m]");
  make_field->add_option("--resolution", field.resolution_m, "ground size of one pixel [m]");
  make_field->add_option("--clusters", field.clusters, "number of vegetation patches");
  make_field->add_option("--cluster-radius-min", field.cluster_radius_min_m, "smallest patch lobe radius [m]");
  make_field->add_option("--cluster-radius-max", field.cluster_radius_max_m, "largest patch lobe radius [m]");
  make_field->add_option("--crop-cover", field.crop_cover, "crop disc area per patch area");
  make_field->add_option("--weed-cover", field.weed_cover, "weed disc area per patch area");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*init) {
      mrplan::cmd_init_decision(resolve(init_opts), std::cout);
    } else if (*run) {
      const auto c = resolve(run_opts);
      const auto out = mrplan::cmd_run(c, mrplan::parse_strategy(strategy), c.output_dir, std::cout);
      std::cout << "results in " << out.dir.string() << '\n';
    } else if (*sweep) {
      const auto c = resolve(sweep_opts);
      mrplan::cmd_sweep(c, c.output_dir, std::cout);
      std::cout << "curve and plots in " << c.output_dir.string() << '\n';
    } else if (*make_field) {
      const std::filesystem::path raster(field_out);
      const auto map = mrplan::generate_field(field);
      if (raster.has_parent_path()) std::filesystem::create_directories(raster.parent_path());
      mrplan::save_map(map, raster, std::filesystem::path(raster).replace_extension(".json"));
      std::printf("%s: %dx%d px, interest cover %.4f\n", raster.string().c_str(), map.width_px(), map.height_px(),
                  mrplan::class_fraction(map, {1, 2}));
    }
  } catch (const mrplan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
