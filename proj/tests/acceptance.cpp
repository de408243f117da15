// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "mrplan/camera.hpp"
#include "mrplan/decision.hpp"
#include "mrplan/fieldgen.hpp"
#include "mrplan/gp.hpp"
#include "mrplan/metrics.hpp"
#include "mrplan/planner.hpp"
#include "oracles.hpp"

using namespace mrplan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: GP against the dense oracle ----

void gp_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-5.0, 5.0), noise(-0.3, 0.3);
  std::uniform_real_distribution<double> ell(0.3, 2.0), sf2(0.2, 3.0), sn2(0.01, 0.5);
  double worst_post = 0.0, worst_lml = 0.0, worst_inc = 0.0;
  int instances = 0;
  for (int n : {1, 2, 5, 10, 20, 50, 100, 150, 200}) {
    for (int rep = 0; rep < 3; ++rep, ++instances) {
      std::vector<double> x(n), y(n);
      for (int i = 0; i < n; ++i) {
        x[i] = ux(rng);
        y[i] = std::sin(x[i]) + noise(rng);
      }
      const Hyperparams th{ell(rng), sf2(rng), sn2(rng)};
      std::vector<double> q;
      for (int i = 0; i < 40; ++i) q.push_back(-6.0 + 12.0 * i / 39.0);
      const GpModel gp(x, y, th);
      const auto got = gp.posterior(q);
      const auto want = oracle::gp_posterior(x, y, th.length_scale, th.signal_var, th.noise_var, q);
      for (std::size_t i = 0; i < q.size(); ++i) {
        worst_post = std::max({worst_post, std::abs(got[i].mean - want[i].mean), std::abs(got[i].var - want[i].var)});
      }
      worst_lml = std::max(worst_lml, std::abs(log_marginal_likelihood(x, y, th) -
                                               oracle::gp_lml(x, y, th.length_scale, th.signal_var, th.noise_var)));
      GpModel inc(th);
      for (int i = 0; i < n; ++i) inc = add_observation(inc, x[i], y[i]);
      const auto a = inc.posterior(q);
      for (std::size_t i = 0; i < q.size(); ++i) {
        worst_inc = std::max({worst_inc, std::abs(a[i].mean - got[i].mean), std::abs(a[i].var - got[i].var)});
      }
    }
  }
  const double t = seconds_since(t0);
  const bool ok = worst_post <= 1e-8 && worst_lml <= 1e-8 && worst_inc <= 1e-10 && t < 5.0;
  report(1, ok,
         fmt("%d instances N<=200: max posterior err %.2e, max LML err %.2e (tol 1e-8), "
             "incremental vs batch %.2e (tol 1e-10), %.2f s (limit 5 s)",
             instances, worst_post, worst_lml, worst_inc, t));
}

// ---- 2: metrics against set counting ----

void metric_oracles() {
  bool ok = true;
  double worst = 0.0;
  auto grid = [](int w, int h, std::vector<Label> v) {
    LabelGrid g(w, h, 0);
    g.data = std::move(v);
    return g;
  };
  // Hand-derived 4-pixel cases.
  const InterestSet veg({1, 2}, 3);
  const LabelGrid gt = grid(2, 2, {1, 1, 2, 0});
  ok &= miou(confusion(grid(2, 2, {1, 2, 2, 0}), gt, 3), veg).value == 0.5;
  ok &= miou(confusion(gt, gt, 3), veg).value == 1.0;
  ok &= miou(confusion(grid(2, 2, {2, 2, 1, 0}), gt, 3), veg).value == 0.0;
  ok &= semantic_ratio(gt, veg) == 0.75;
  ok &= semantic_ratio(grid(2, 2, {0, 0, 0, 0}), veg) == 0.0;
  const MiouResult vac = miou(confusion(grid(2, 2, {0, 0, 0, 0}), grid(2, 2, {0, 0, 0, 0}), 3), veg);
  ok &= vac.vacuous && vac.value == 1.0;

  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const int C = 2 + static_cast<int>(rng() % 5);
    std::vector<Label> p(256), g(256);
    for (int i = 0; i < 256; ++i) {
      p[i] = rng() % 12 == 0 ? kVoidLabel : static_cast<Label>(rng() % C);
      g[i] = rng() % 12 == 0 ? kVoidLabel : static_cast<Label>(rng() % C);
    }
    std::vector<Label> chosen;
    for (Label l = 0; l < C; ++l) {
      if (rng() % 2) chosen.push_back(l);
    }
    if (chosen.empty()) chosen.push_back(0);
    const InterestSet is(chosen, C);
    const MiouResult r = miou(confusion(grid(16, 16, p), grid(16, 16, g), C), is);
    const auto o = oracle::miou(p, g, chosen);
    worst = std::max(worst, std::abs(r.value - o.value));
    worst = std::max(worst, std::abs(semantic_ratio(grid(16, 16, p), is) - oracle::sigma(p, chosen)));
    ok &= r.vacuous == o.vacuous;
  }
  ok &= worst <= 1e-12;
  report(2, ok, fmt("hand cases and 200 random 16x16 grids: max |mIoU, sigma - oracle| = %.2e (tol 1e-12)", worst));
}

// ---- 3: coverage geometry ----

void geometry() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> L(5.0, 500.0), H(2.0, 80.0), frac(0.1, 0.95);
  const CameraModel cam{2.0, 1.0, 200, 150};
  int bad_cover = 0, bad_overlap = 0, bad_descent = 0;
  for (int t = 0; t < 100; ++t) {
    const GroundRect ext{0.0, 0.0, L(rng), L(rng)};
    const auto wps = lawnmower_waypoints(ext, cam, H(rng));
    std::uniform_real_distribution<double> ux(ext.min_x, ext.max_x), uy(ext.min_y, ext.max_y);
    const auto covered = [&](double x, double y) {
      for (const auto& w : wps) {
        if (footprint(cam, w).contains(x, y)) return true;
      }
      return false;
    };
    for (int k = 0; k < 200; ++k) bad_cover += !covered(ux(rng), uy(rng));
    for (double x : {ext.min_x, ext.max_x}) {
      for (double y : {ext.min_y, ext.max_y}) bad_cover += !covered(x, y);
    }
    const GroundRect f0 = footprint(cam, wps.front());
    for (std::size_t i = 0; i < wps.size(); ++i) {
      for (std::size_t j = i + 1; j < wps.size(); ++j) {
        bad_overlap += overlap_area(footprint(cam, wps[i]), footprint(cam, wps[j])) > 1e-9 * f0.width() * f0.height();
      }
    }
    const Waypoint& parent = wps[rng() % wps.size()];
    const GroundRect pr = footprint(cam, parent);
    const double tol = 1e-9 * pr.width();
    for (const auto& s : descent_waypoints(parent, cam, parent.h * frac(rng))) {
      const GroundRect r = footprint(cam, s);
      bad_descent += r.min_x < pr.min_x - tol || r.max_x > pr.max_x + tol || r.min_y < pr.min_y - tol ||
                     r.max_y > pr.max_y + tol;
    }
  }
  report(3, bad_cover == 0 && bad_overlap == 0 && bad_descent == 0,
         fmt("100 random fields: %d uncovered samples, %d overlapping pairs, %d descent footprints outside parent",
             bad_cover, bad_overlap, bad_descent));
}

// ---- 4-7: the desk-scale mission fixture ----

struct Fixture {
  CameraModel cam{2.0, 1.0, 200, 200};  // altitude in m equals GSD in cm/px
  std::vector<double> gsds{15.0, 12.5, 10.0, 7.5, 5.0};
  std::vector<double> altitudes;
  Kinematics kin;
  InterestSet interest{{1, 2}, 3};
  double tau_gain = 0.08;

  Fixture() {
    for (double g : gsds) altitudes.push_back(altitude_for_gsd(cam, g));
  }

  static FieldSpec field(std::uint64_t seed, double crop_cover) {
    FieldSpec f;  // 200 x 200 m at 5 cm/px, six clustered patches
    f.seed = seed;
    f.crop_cover = crop_cover;
    f.weed_cover = crop_cover / 4;
    f.cluster_radius_min_m = 8.0;
    f.cluster_radius_max_m = 14.0;
    return f;
  }

  SensorModel sensor(std::uint64_t seed) const {
    SensorModel m;
    m.k_eps = 0.02;
    m.mode = ConfusionMode::AdjacentClass;
    // Soil is never hallucinated; vegetation mostly reads as soil, sometimes as the other plant class.
    m.confusion = {{}, {0, 0, 2}, {0, 0, 1}};
    m.seed = seed;
    return m;
  }

  InitOptions init_options() const {
    InitOptions o;
    o.tau_gain = tau_gain;
    o.bounds.length_lo = 1.0;  // standardized units
    return o;
  }
};

struct LowAltitude {
  double sum = 0.0;
  int n = 0;
  void add(const MissionResult& m) {
    for (const auto& v : m.visits) {
      if (v.depth > 0 && !v.miou.vacuous) {
        sum += v.miou.value;
        ++n;
      }
    }
  }
  double mean() const { return n ? sum / n : 0.0; }
};

bool same_mission(const MissionResult& a, const MissionResult& b) {
  if (a.visits.size() != b.visits.size()) return false;
  for (std::size_t i = 0; i < a.visits.size(); ++i) {
    const VisitRecord &p = a.visits[i], &q = b.visits[i];
    if (!(p.wp == q.wp) || p.arrival_t != q.arrival_t || p.action != q.action || p.sigma != q.sigma ||
        p.miou.value != q.miou.value) {
      return false;
    }
  }
  return a.total_time == b.total_time && a.field_miou == b.field_miou && a.stitched.labels == b.stitched.labels &&
         a.stitched.best_gsd == b.stitched.best_gsd && a.descent_events == b.descent_events;
}

// Criterion 6 for one adaptive mission.
bool online_contract(const DecisionModel& before, const AdaptiveRun& run, std::string& why) {
  const ObservationSets s0 = before.sets(), s1 = run.model.sets();
  const std::size_t d = static_cast<std::size_t>(run.mission.descent_events);
  if (s1.O.size() != s0.O.size() + d || s1.S.size() != s0.S.size() + d) {
    why = "set sizes";
    return false;
  }
  if (to_json(run.model.gp_I).dump() != to_json(before.gp_I).dump()) {
    why = "I changed";
    return false;
  }
  if (!std::equal(s0.O.begin(), s0.O.end(), s1.O.begin())) {
    why = "existing O pairs changed";
    return false;
  }
  // Replay the appended pairs one at a time: the posterior mean at each new
  // Δσ must end no farther from its Δh than it started.
  GpModel gp = before.gp_O;
  for (std::size_t k = s0.O.size(); k < s1.O.size(); ++k) {
    const DeltaPair p = s1.O[k];
    const double m0 = gp.mean(p.x);
    gp = add_observation(gp, p.x, p.y);
    if (std::abs(gp.mean(p.x) - p.y) > std::abs(m0 - p.y) + 1e-12) {
      why = "mean moved away from an observed dh";
      return false;
    }
  }
  for (double q = -1.0; q <= 0.5; q += 0.05) {
    if (std::abs(gp.mean(q) - run.model.gp_O.mean(q)) > 1e-9) {
      why = "mission model differs from the replay";
      return false;
    }
  }
  return true;
}

void missions() {
  const Fixture fx;
  const int kSeeds = 20;
  const auto t0 = Clock::now();
  int pass4 = 0, contract_ok = 0;
  double max_interest = 0.0;
  std::string contract_why;
  LowAltitude low_ad, low_na;
  bool equiv_ok = true;
  std::string equiv_why;

  for (int s = 0; s < kSeeds; ++s) {
    const SemanticMap train = generate_field(Fixture::field(1000 + s, 0.4));
    const SemanticMap test = generate_field(Fixture::field(2000 + s, 0.8));
    max_interest = std::max(max_interest, class_fraction(test, {1, 2}));
    const SyntheticSensor train_sensor(fx.sensor(77 + s)), test_sensor(fx.sensor(99 + s));
    const DecisionModel model =
        initialize_decision(train, fx.cam, train_sensor, fx.altitudes, fx.interest, fx.init_options());

    std::vector<MissionResult> lawnmowers;
    for (double h : fx.altitudes) {
      lawnmowers.push_back(run_fixed_lawnmower(test, fx.cam, test_sensor, h, fx.kin, fx.interest));
    }
    const MissionResult na = run_non_adaptive(test, fx.cam, test_sensor, model, fx.kin, fx.interest);
    const AdaptiveRun ad = run_adaptive(test, fx.cam, test_sensor, model, fx.kin, fx.interest);

    bool dominates = false;
    for (const auto& lm : lawnmowers) {
      dominates |= ad.mission.total_time < lm.total_time && ad.mission.field_miou > lm.field_miou;
    }
    const bool at_least_na = ad.mission.field_miou >= na.field_miou;
    pass4 += dominates && at_least_na;
    std::printf("  seed %2d: adaptive %.0f s / %.4f (%d descents), non-adaptive %.0f s / %.4f, "
                "lawnmower@7.5 %.0f s / %.4f  %s%s\n",
                s, ad.mission.total_time, ad.mission.field_miou, ad.mission.descent_events, na.total_time,
                na.field_miou, lawnmowers[3].total_time, lawnmowers[3].field_miou, dominates ? "dominates" : "-",
                at_least_na ? "" : ", below non-adaptive");
    low_ad.add(ad.mission);
    low_na.add(na);

    std::string why;
    if (online_contract(model, ad, why)) {
      ++contract_ok;
    } else if (contract_why.empty()) {
      contract_why = "seed " + std::to_string(s) + ": " + why;
    }

    if (s == 0) {
      // Degenerate policies on the first field.
      DecisionModel never = model;
      never.tau_gain = std::numeric_limits<double>::infinity();
      const MissionResult& ref = lawnmowers.front();
      const AdaptiveRun ad_inf = run_adaptive(test, fx.cam, test_sensor, never, fx.kin, fx.interest);
      if (!same_mission(ad_inf.mission, ref)) equiv_why += " adaptive(tau=inf)";
      if (!same_mission(run_non_adaptive(test, fx.cam, test_sensor, never, fx.kin, fx.interest), ref)) {
        equiv_why += " non-adaptive(tau=inf)";
      }
      if (!same_mission(run_non_adaptive(test, fx.cam, test_sensor, empty_decision_model(fx.altitudes), fx.kin,
                                         fx.interest),
                        ref)) {
        equiv_why += " non-adaptive(empty model)";
      }
      equiv_ok = equiv_why.empty();
    }
  }
  const double t = seconds_since(t0);
  const bool field_ok = max_interest <= 0.2;
  report(4, pass4 >= 16 && field_ok && t < 120.0,
         fmt("adaptive dominates a lawnmower point and matches non-adaptive mIoU in %d/%d seeds (need 16); "
             "max interest cover %.3f (limit 0.2); %.1f s (limit 120 s)",
             pass4, kSeeds, max_interest, t));
  report(5, low_ad.mean() > low_na.mean(),
         fmt("mean per-image mIoU below h_max: adaptive %.4f over %d images, non-adaptive %.4f over %d images",
             low_ad.mean(), low_ad.n, low_na.mean(), low_na.n));
  report(6, contract_ok == kSeeds,
         fmt("online-update contract held in %d/%d adaptive missions%s", contract_ok, kSeeds,
             contract_why.empty() ? "" : (" (" + contract_why + ")").c_str()));
  report(7, equiv_ok,
         equiv_ok ? "tau=inf adaptive and non-adaptive, and empty-model non-adaptive, equal lawnmower@h_max"
                  : "differs from lawnmower@h_max:" + equiv_why);
}

// ---- 8: CLI determinism ----

int sh(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testutil::slurp(e.path());
  }
  return files;
}

void determinism() {
  const std::string cli = MRPLAN_CLI_PATH;
  const fs::path dir = testutil::temp_dir("acceptance_determinism");
  testutil::spit(dir / "exp.json", R"({
  "version": 1,
  "train_map": "fields/train.pgm",
  "test_map": "fields/test.pgm",
  "camera": {"sensor_width_cm": 1.0, "focal_length_cm": 1.0, "image_width_px": 100, "image_height_px": 100},
  "sensor": {"k_eps": 0.02, "confusion_mode": "adjacent", "confusion": {"crop": ["soil", "weed"], "weed": ["soil"]}},
  "interest_classes": ["crop", "weed"],
  "gsd_candidates_cm": [8, 4, 2],
  "tau_gain": 0.01,
  "seed": 11
})");
  const std::string cfg = " --config " + (dir / "exp.json").string();
  const std::vector<std::string> commands{
      cli + " make-field --out " + (dir / "fields/train.pgm").string() +
          " --seed 5 --width 24 --height 24 --resolution 0.02 --clusters 3 --cluster-radius-min 1"
          " --cluster-radius-max 2 --crop-cover 0.4",
      cli + " make-field --out " + (dir / "fields/test.pgm").string() +
          " --seed 6 --width 24 --height 24 --resolution 0.02 --clusters 3 --cluster-radius-min 1"
          " --cluster-radius-max 2 --crop-cover 0.7",
      cli + " init-decision" + cfg,
      cli + " run" + cfg + " --strategy lawnmower@4",
      cli + " run" + cfg + " --strategy non-adaptive",
      cli + " run" + cfg + " --strategy adaptive",
      cli + " run" + cfg + " --strategy linear",
      cli + " sweep" + cfg,
  };
  std::map<std::string, std::string> first;
  int rc_bad = 0;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(dir / "fields");
    fs::remove_all(dir / "out");
    for (const auto& c : commands) rc_bad += sh(c) != 0;
    auto snap = snapshot(dir);
    if (pass == 0) first = std::move(snap);
    else {
      int differ = 0, compared = 0;
      for (const auto& [name, bytes] : first) {
        ++compared;
        const auto it = snap.find(name);
        differ += it == snap.end() || it->second != bytes;
      }
      differ += snap.size() != first.size();
      int tabular = 0;
      for (const auto& [name, bytes] : first) {
        const auto ext = fs::path(name).extension();
        tabular += ext == ".csv" || ext == ".json";
      }
      report(8, rc_bad == 0 && differ == 0 && tabular > 0,
             fmt("%zu commands run twice: %d failed, %d of %d output files differ (%d CSV/JSON)", commands.size(),
                 rc_bad, differ, compared, tabular));
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> steps{
      {"gp", gp_oracles}, {"metrics", metric_oracles}, {"geometry", geometry}, {"missions", missions},
      {"determinism", determinism}};
  for (const auto& [name, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("error in %s checks: %s\n", name, e.what());
      ++failures;
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
