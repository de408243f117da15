#include "mrplan/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mrplan/error.hpp"

namespace mrplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using KeyPath = std::vector<std::string>;

std::string dotted(const KeyPath& path) {
  std::string s;
  for (const auto& k : path) {
    if (!s.empty()) s += '.';
    s += k;
  }
  return s;
}

// Schema checks against the parsed tree. Line numbers come from locating the
// key path in the raw text: each key is searched for after the previous one,
// which finds the right occurrence for any config that does not repeat a key
// name earlier in a sibling object.
class Schema {
public:
  Schema(const std::string& text, fs::path base) : text_(text), base_(std::move(base)) {}

  [[noreturn]] void fail(const KeyPath& path, const std::string& msg) const {
    std::string where = "config";
    if (const auto line = locate(path)) where += " line " + std::to_string(*line);
    if (!path.empty()) where += ", '" + dotted(path) + "'";
    throw ConfigError(where + ": " + msg);
  }

  void only_keys(const json& obj, const KeyPath& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) {
        KeyPath p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& obj, const KeyPath& path, const std::string& key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    return number_value(obj[key], sub(path, key));
  }

  double number_value(const json& v, const KeyPath& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  double positive(const json& obj, const KeyPath& path, const std::string& key, double fallback) const {
    const double d = number(obj, path, key, fallback);
    if (!(d > 0.0)) fail(sub(path, key), "must be strictly positive");
    return d;
  }

  double non_negative(const json& obj, const KeyPath& path, const std::string& key, double fallback) const {
    const double d = number(obj, path, key, fallback);
    if (!(d >= 0.0)) fail(sub(path, key), "must be non-negative");
    return d;
  }

  long integer(const json& obj, const KeyPath& path, const std::string& key, long fallback, long lo, long hi) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj[key];
    if (!v.is_number_integer()) fail(sub(path, key), "expected an integer");
    const long i = v.get<long>();
    if (i < lo || i > hi) {
      fail(sub(path, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return i;
  }

  std::string string(const json& obj, const KeyPath& path, const std::string& key) const {
    if (!obj.contains(key)) fail(sub(path, key), "is required");
    const json& v = obj[key];
    if (!v.is_string() || v.get<std::string>().empty()) fail(sub(path, key), "expected a non-empty string");
    return v.get<std::string>();
  }

  fs::path file(const json& obj, const KeyPath& path, const std::string& key) const {
    return resolve(string(obj, path, key));
  }

  fs::path resolve(const fs::path& p) const { return (p.is_absolute() ? p : base_ / p).lexically_normal(); }

  static KeyPath sub(KeyPath path, const std::string& key) {
    path.push_back(key);
    return path;
  }

private:
  std::optional<int> locate(const KeyPath& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& key : path) {
      const std::size_t at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      pos = at + 1;
      found = true;
    }
    if (!found) return std::nullopt;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

  const std::string& text_;
  fs::path base_;
};

MapPaths parse_map(const Schema& s, const json& root, const std::string& key) {
  if (!root.contains(key)) s.fail({key}, "is required");
  const json& v = root[key];
  MapPaths m;
  if (v.is_string()) {
    m.raster = s.resolve(v.get<std::string>());
  } else {
    s.only_keys(v, {key}, {"raster", "legend"});
    m.raster = s.file(v, {key}, "raster");
    if (v.contains("legend")) m.legend = s.file(v, {key}, "legend");
  }
  if (m.legend.empty()) m.legend = fs::path(m.raster).replace_extension(".json");
  return m;
}

SensorConfig parse_sensor(const Schema& s, const json& root) {
  SensorConfig sc;
  if (!root.contains("sensor")) return sc;
  const json& v = root["sensor"];
  const KeyPath p{"sensor"};
  s.only_keys(v, p, {"mode", "eps0", "k_eps", "confusion_mode", "confusion", "pred_dir", "train_pred_dir"});
  const std::string mode = v.contains("mode") ? s.string(v, p, "mode") : "synthetic";
  if (mode == "synthetic") {
    sc.kind = SensorKind::Synthetic;
  } else if (mode == "replay") {
    sc.kind = SensorKind::Replay;
    sc.pred_dir = s.file(v, p, "pred_dir");
    sc.train_pred_dir = s.file(v, p, "train_pred_dir");
  } else {
    s.fail(Schema::sub(p, "mode"), "expected \"synthetic\" or \"replay\", got \"" + mode + "\"");
  }
  sc.eps0 = s.non_negative(v, p, "eps0", 0.0);
  sc.k_eps = s.non_negative(v, p, "k_eps", 0.0);
  const std::string cm = v.contains("confusion_mode") ? s.string(v, p, "confusion_mode") : "uniform";
  if (cm == "uniform") {
    sc.mode = ConfusionMode::Uniform;
    if (v.contains("confusion")) s.fail(Schema::sub(p, "confusion"), "only allowed with confusion_mode \"adjacent\"");
  } else if (cm == "adjacent") {
    sc.mode = ConfusionMode::AdjacentClass;
    if (!v.contains("confusion") || !v["confusion"].is_object()) {
      s.fail(Schema::sub(p, "confusion"), "adjacent mode needs an object of class -> [classes]");
    }
    for (const auto& [cls, targets] : v["confusion"].items()) {
      const KeyPath cp{"sensor", "confusion", cls};
      if (!targets.is_array()) s.fail(cp, "expected an array of class names");
      std::vector<std::string> names;
      for (const auto& t : targets) {
        if (!t.is_string()) s.fail(cp, "expected an array of class names");
        names.push_back(t.get<std::string>());
      }
      sc.confusion.emplace_back(cls, std::move(names));
    }
  } else {
    s.fail(Schema::sub(p, "confusion_mode"), "expected \"uniform\" or \"adjacent\", got \"" + cm + "\"");
  }
  return sc;
}

std::vector<double> parse_altitudes(const Schema& s, const json& root, const CameraModel& cam) {
  const bool by_gsd = root.contains("gsd_candidates_cm");
  const bool by_alt = root.contains("altitudes_m");
  if (by_gsd == by_alt) s.fail({}, "exactly one of 'gsd_candidates_cm' and 'altitudes_m' is required");
  const std::string key = by_gsd ? "gsd_candidates_cm" : "altitudes_m";
  const json& v = root[key];
  if (!v.is_array()) s.fail({key}, "expected an array of numbers");
  if (v.empty()) s.fail({key}, "altitude candidate list is empty");
  std::vector<double> alts;
  for (const auto& e : v) {
    const double d = s.number_value(e, {key});
    if (!(d > 0.0)) s.fail({key}, "candidates must be strictly positive");
    alts.push_back(by_gsd ? altitude_for_gsd(cam, d) : d);
  }
  std::sort(alts.begin(), alts.end(), std::greater<>());
  for (std::size_t i = 1; i < alts.size(); ++i) {
    if (!(alts[i] < alts[i - 1])) s.fail({key}, "candidates must be distinct");
  }
  return alts;
}

}  // namespace

std::vector<double> ExperimentConfig::gsds() const {
  std::vector<double> g;
  for (double h : altitudes) g.push_back(gsd_at(camera, h));
  return g;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Schema s(text, base_dir);
  s.only_keys(root, {},
              {"version", "train_map", "test_map", "camera", "sensor", "kinematics", "interest_classes",
               "gsd_candidates_cm", "altitudes_m", "tau_gain", "max_depth", "seed", "output_dir", "model_path",
               "linear", "gp"});
  if (!root.contains("version")) s.fail({"version"}, "is required");
  if (root["version"] != kConfigVersion) {
    s.fail({"version"}, "unsupported version " + root["version"].dump() + ", expected " +
                            std::to_string(kConfigVersion));
  }

  ExperimentConfig c;
  c.train_map = parse_map(s, root, "train_map");
  c.test_map = parse_map(s, root, "test_map");
  if (fs::weakly_canonical(c.train_map.raster) == fs::weakly_canonical(c.test_map.raster)) {
    s.fail({"test_map"}, "training and test maps must be different files (got " + c.test_map.raster.string() + ")");
  }

  if (root.contains("camera")) {
    const json& v = root["camera"];
    const KeyPath p{"camera"};
    s.only_keys(v, p, {"sensor_width_cm", "focal_length_cm", "image_width_px", "image_height_px"});
    c.camera.sensor_width_cm = s.positive(v, p, "sensor_width_cm", c.camera.sensor_width_cm);
    c.camera.focal_length_cm = s.positive(v, p, "focal_length_cm", c.camera.focal_length_cm);
    c.camera.image_width_px = static_cast<int>(s.integer(v, p, "image_width_px", c.camera.image_width_px, 1, 1 << 16));
    c.camera.image_height_px =
        static_cast<int>(s.integer(v, p, "image_height_px", c.camera.image_height_px, 1, 1 << 16));
  }

  c.sensor = parse_sensor(s, root);

  if (root.contains("kinematics")) {
    const json& v = root["kinematics"];
    const KeyPath p{"kinematics"};
    s.only_keys(v, p, {"v_max", "a_max", "t_hover"});
    c.kinematics.v_max = s.positive(v, p, "v_max", c.kinematics.v_max);
    c.kinematics.a_max = s.positive(v, p, "a_max", c.kinematics.a_max);
    c.kinematics.t_hover = s.positive(v, p, "t_hover", c.kinematics.t_hover);
  }

  if (!root.contains("interest_classes")) s.fail({"interest_classes"}, "is required");
  {
    const json& v = root["interest_classes"];
    if (!v.is_array() || v.empty()) s.fail({"interest_classes"}, "expected a non-empty array of class names");
    std::set<std::string> seen;
    for (const auto& e : v) {
      if (!e.is_string()) s.fail({"interest_classes"}, "expected a non-empty array of class names");
      if (!seen.insert(e.get<std::string>()).second) s.fail({"interest_classes"}, "duplicate class name");
      c.interest_classes.push_back(e.get<std::string>());
    }
  }

  c.altitudes = parse_altitudes(s, root, c.camera);

  if (root.contains("tau_gain")) {
    const json& v = root["tau_gain"];
    if (v.is_string() && v.get<std::string>() == "inf") {
      c.tau_gain = std::numeric_limits<double>::infinity();
    } else {
      c.tau_gain = s.number_value(v, {"tau_gain"});
    }
  }
  if (root.contains("max_depth") && !root["max_depth"].is_null()) {
    c.max_depth = static_cast<int>(s.integer(root, {}, "max_depth", 0, 0, 1 << 20));
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) s.fail({"seed"}, "expected a non-negative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }

  c.output_dir = root.contains("output_dir") ? s.file(root, {}, "output_dir") : s.resolve("out");
  c.model_path = root.contains("model_path") ? s.file(root, {}, "model_path") : c.output_dir / "decision_model.json";

  if (root.contains("linear")) {
    const json& v = root["linear"];
    const KeyPath p{"linear"};
    s.only_keys(v, p, {"sigma_low", "sigma_high"});
    c.linear.sigma_low = s.number(v, p, "sigma_low", c.linear.sigma_low);
    c.linear.sigma_high = s.number(v, p, "sigma_high", c.linear.sigma_high);
    if (!(c.linear.sigma_high > c.linear.sigma_low)) s.fail(p, "sigma_high must exceed sigma_low");
  }

  if (root.contains("gp")) {
    const json& v = root["gp"];
    const KeyPath p{"gp"};
    s.only_keys(v, p,
                {"length_lo", "length_hi", "signal_lo", "signal_hi", "noise_lo", "noise_hi", "length_steps",
                 "signal_steps", "noise_steps", "refine_sweeps"});
    HyperBounds& b = c.gp_bounds;
    b.length_lo = s.positive(v, p, "length_lo", b.length_lo);
    b.length_hi = s.positive(v, p, "length_hi", b.length_hi);
    b.signal_lo = s.positive(v, p, "signal_lo", b.signal_lo);
    b.signal_hi = s.positive(v, p, "signal_hi", b.signal_hi);
    b.noise_lo = s.positive(v, p, "noise_lo", b.noise_lo);
    b.noise_hi = s.positive(v, p, "noise_hi", b.noise_hi);
    b.length_steps = static_cast<int>(s.integer(v, p, "length_steps", b.length_steps, 1, 256));
    b.signal_steps = static_cast<int>(s.integer(v, p, "signal_steps", b.signal_steps, 1, 256));
    b.noise_steps = static_cast<int>(s.integer(v, p, "noise_steps", b.noise_steps, 1, 256));
    b.refine_sweeps = static_cast<int>(s.integer(v, p, "refine_sweeps", b.refine_sweeps, 0, 16));
    if (!(b.length_lo <= b.length_hi) || !(b.signal_lo <= b.signal_hi) || !(b.noise_lo <= b.noise_hi)) {
      s.fail(p, "every lower bound must not exceed its upper bound");
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path base = fs::absolute(path).parent_path();
  return parse_config(ss.str(), base);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["version"] = kConfigVersion;
  j["train_map"] = {{"raster", c.train_map.raster.string()}, {"legend", c.train_map.legend.string()}};
  j["test_map"] = {{"raster", c.test_map.raster.string()}, {"legend", c.test_map.legend.string()}};
  j["camera"] = {{"sensor_width_cm", c.camera.sensor_width_cm},
                 {"focal_length_cm", c.camera.focal_length_cm},
                 {"image_width_px", c.camera.image_width_px},
                 {"image_height_px", c.camera.image_height_px}};
  json sensor;
  sensor["mode"] = c.sensor.kind == SensorKind::Synthetic ? "synthetic" : "replay";
  sensor["eps0"] = c.sensor.eps0;
  sensor["k_eps"] = c.sensor.k_eps;
  if (c.sensor.mode == ConfusionMode::AdjacentClass) {
    sensor["confusion_mode"] = "adjacent";
    json conf = json::object();
    for (const auto& [cls, targets] : c.sensor.confusion) conf[cls] = targets;
    sensor["confusion"] = conf;
  } else {
    sensor["confusion_mode"] = "uniform";
  }
  if (c.sensor.kind == SensorKind::Replay) {
    sensor["pred_dir"] = c.sensor.pred_dir.string();
    sensor["train_pred_dir"] = c.sensor.train_pred_dir.string();
  }
  j["sensor"] = sensor;
  j["kinematics"] = {{"v_max", c.kinematics.v_max}, {"a_max", c.kinematics.a_max}, {"t_hover", c.kinematics.t_hover}};
  j["interest_classes"] = c.interest_classes;
  j["altitudes_m"] = c.altitudes;
  if (std::isinf(c.tau_gain)) {
    j["tau_gain"] = "inf";
  } else {
    j["tau_gain"] = c.tau_gain;
  }
  j["max_depth"] = c.max_depth == kUnboundedDepth ? json(nullptr) : json(c.max_depth);
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["model_path"] = c.model_path.string();
  j["linear"] = {{"sigma_low", c.linear.sigma_low}, {"sigma_high", c.linear.sigma_high}};
  const HyperBounds& b = c.gp_bounds;
  j["gp"] = {{"length_lo", b.length_lo},       {"length_hi", b.length_hi},       {"signal_lo", b.signal_lo},
             {"signal_hi", b.signal_hi},       {"noise_lo", b.noise_lo},         {"noise_hi", b.noise_hi},
             {"length_steps", b.length_steps}, {"signal_steps", b.signal_steps}, {"noise_steps", b.noise_steps},
             {"refine_sweeps", b.refine_sweeps}};
  return j;
}

std::uint64_t test_sensor_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x7465737400000000ULL); }
std::uint64_t train_sensor_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x747261696e000000ULL); }

SensorModel sensor_model(const ExperimentConfig& c, const SemanticMap& map, std::uint64_t seed) {
  SensorModel m;
  m.eps0 = c.sensor.eps0;
  m.k_eps = c.sensor.k_eps;
  m.mode = c.sensor.mode;
  m.seed = seed;
  if (m.mode == ConfusionMode::AdjacentClass) {
    m.confusion.assign(map.num_classes(), {});
    for (const auto& [cls, targets] : c.sensor.confusion) {
      auto& list = m.confusion[map.class_index(cls)];
      for (const auto& t : targets) list.push_back(map.class_index(t));
    }
  }
  m.validate(map.num_classes());
  return m;
}

std::unique_ptr<Sensor> make_sensor(const ExperimentConfig& c, const SemanticMap& map, bool training) {
  if (c.sensor.kind == SensorKind::Replay) {
    return std::make_unique<ReplaySensor>(training ? c.sensor.train_pred_dir : c.sensor.pred_dir);
  }
  const std::uint64_t seed = training ? train_sensor_seed(c.seed) : test_sensor_seed(c.seed);
  return std::make_unique<SyntheticSensor>(sensor_model(c, map, seed));
}

InterestSet interest_set(const ExperimentConfig& c, const SemanticMap& map) {
  std::vector<Label> classes;
  for (const auto& name : c.interest_classes) classes.push_back(map.class_index(name));
  return InterestSet(std::move(classes), map.num_classes());
}

}  // namespace mrplan
