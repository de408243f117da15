#include "mrplan/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mrplan/error.hpp"

namespace mrplan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf.data(), end);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string sigma_field(const VisitRecord& v) { return v.sigma_valid ? format_number(v.sigma) : ""; }

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// Fixed-precision text for drawing coordinates.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

struct Ticks {
  double lo, hi, step;
};

// Round-number axis covering [lo, hi] with roughly `target` intervals.
Ticks nice_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

std::string tick_label(double v, double step) {
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);
  return s;
}

// Dark purple at low t through teal to yellow at high t.
std::string altitude_color(double t) {
  static constexpr std::array<std::array<double, 3>, 3> stops{{{68, 1, 84}, {33, 145, 140}, {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double f = t * 2.0;
  const int i = std::min(1, static_cast<int>(f));
  const double u = f - i;
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(stops[i][k] + u * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

const char* strategy_color(const std::string& s) {
  if (s == "adaptive") return "#d62728";
  if (s == "non-adaptive") return "#1f77b4";
  if (s == "linear") return "#2ca02c";
  return "#555555";
}

}  // namespace

void write_trajectory_csv(const fs::path& path, const MissionResult& mission) {
  auto out = open_out(path);
  out << "index,x,y,h,gsd,arrival_t,action,sigma,miou\n";
  for (std::size_t i = 0; i < mission.visits.size(); ++i) {
    const VisitRecord& v = mission.visits[i];
    out << i << ',' << format_number(v.wp.x) << ',' << format_number(v.wp.y) << ',' << format_number(v.wp.h) << ','
        << format_number(v.wp.gsd) << ',' << format_number(v.arrival_t) << ',' << to_string(v.action) << ','
        << sigma_field(v) << ',' << format_number(v.miou.value) << '\n';
  }
}

void write_images_csv(const fs::path& path, const MissionResult& mission, const std::vector<std::string>& legend,
                      const InterestSet& interest) {
  auto out = open_out(path);
  out << "x,y,h,gsd,sigma";
  for (Label c : interest.classes()) out << ",iou_" << legend.at(c);
  out << ",miou,vacuous\n";
  for (const VisitRecord& v : mission.visits) {
    out << format_number(v.wp.x) << ',' << format_number(v.wp.y) << ',' << format_number(v.wp.h) << ','
        << format_number(v.wp.gsd) << ',' << sigma_field(v);
    for (std::size_t k = 0; k < interest.size(); ++k) {
      out << ',';
      if (k < v.miou.per_class.size() && v.miou.per_class[k]) out << format_number(*v.miou.per_class[k]);
    }
    out << ',' << format_number(v.miou.value) << ',' << (v.miou.vacuous ? 1 : 0) << '\n';
  }
}

json mission_summary(const MissionResult& mission, const std::string& strategy, std::uint64_t seed,
                     const json& resolved_config) {
  json j;
  j["strategy"] = strategy;
  j["field_miou"] = mission.field_miou;
  j["field_miou_vacuous"] = mission.field.vacuous;
  j["total_time_s"] = mission.total_time;
  j["descent_events"] = mission.descent_events;
  j["waypoints"] = mission.visits.size();
  j["seed"] = seed;
  j["config"] = resolved_config;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_curve_csv(const fs::path& path, const std::vector<CurvePoint>& points) {
  auto out = open_out(path);
  out << "strategy,gsd,total_time_s,field_miou\n";
  for (const CurvePoint& p : points) {
    out << p.strategy << ',' << format_number(p.gsd) << ',' << format_number(p.total_time) << ','
        << format_number(p.field_miou) << '\n';
  }
}

void write_scatter_svg(const fs::path& path, const std::vector<CurvePoint>& points) {
  constexpr double W = 640, H = 480, L = 70, R = 150, T = 30, B = 55;
  double tmin = INFINITY, tmax = -INFINITY, mmin = INFINITY, mmax = -INFINITY;
  for (const auto& p : points) {
    tmin = std::min(tmin, p.total_time);
    tmax = std::max(tmax, p.total_time);
    mmin = std::min(mmin, p.field_miou);
    mmax = std::max(mmax, p.field_miou);
  }
  if (points.empty()) tmin = tmax = mmin = mmax = 0.0;
  const Ticks xt = nice_ticks(tmin, tmax);
  const Ticks yt = nice_ticks(mmin, mmax);
  auto sx = [&](double t) { return L + (t - xt.lo) / (xt.hi - xt.lo) * (W - L - R); };
  auto sy = [&](double m) { return H - B - (m - yt.lo) / (yt.hi - yt.lo) * (H - T - B); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<g stroke=\"#dddddd\">\n";
  const int nx = static_cast<int>(std::lround((xt.hi - xt.lo) / xt.step));
  const int ny = static_cast<int>(std::lround((yt.hi - yt.lo) / yt.step));
  for (int i = 0; i <= nx; ++i) {
    const double x = sx(xt.lo + i * xt.step);
    o << "<line x1=\"" << px(x) << "\" y1=\"" << px(T) << "\" x2=\"" << px(x) << "\" y2=\"" << px(H - B) << "\"/>\n";
  }
  for (int i = 0; i <= ny; ++i) {
    const double y = sy(yt.lo + i * yt.step);
    o << "<line x1=\"" << px(L) << "\" y1=\"" << px(y) << "\" x2=\"" << px(W - R) << "\" y2=\"" << px(y) << "\"/>\n";
  }
  o << "</g>\n<g text-anchor=\"middle\">\n";
  for (int i = 0; i <= nx; ++i) {
    const double v = xt.lo + i * xt.step;
    o << "<text x=\"" << px(sx(v)) << "\" y=\"" << px(H - B + 16) << "\">" << tick_label(v, xt.step) << "</text>\n";
  }
  o << "</g>\n<g text-anchor=\"end\">\n";
  for (int i = 0; i <= ny; ++i) {
    const double v = yt.lo + i * yt.step;
    o << "<text x=\"" << px(L - 6) << "\" y=\"" << px(sy(v) + 4) << "\">" << tick_label(v, yt.step) << "</text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << px(L) << "\" y=\"" << px(T) << "\" width=\"" << px(W - L - R) << "\" height=\""
    << px(H - T - B) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << px(L + (W - L - R) / 2) << "\" y=\"" << px(H - 12)
    << "\" text-anchor=\"middle\">execution time [s]</text>\n";
  o << "<text transform=\"translate(18 " << px(T + (H - T - B) / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">field mIoU</text>\n";

  std::vector<CurvePoint> lawn;
  for (const auto& p : points) {
    if (p.strategy == "lawnmower") lawn.push_back(p);
  }
  std::sort(lawn.begin(), lawn.end(), [](const auto& a, const auto& b) { return a.total_time < b.total_time; });
  if (lawn.size() > 1) {
    o << "<polyline fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"4 3\" points=\"";
    for (std::size_t i = 0; i < lawn.size(); ++i) {
      o << (i ? " " : "") << px(sx(lawn[i].total_time)) << ',' << px(sy(lawn[i].field_miou));
    }
    o << "\"/>\n";
  }
  for (const auto& p : points) {
    const double x = sx(p.total_time), y = sy(p.field_miou);
    o << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"4\" fill=\"" << strategy_color(p.strategy)
      << "\"><title>" << xml_escape(p.strategy) << " gsd " << format_number(p.gsd) << "</title></circle>\n";
    if (p.strategy == "lawnmower") {
      o << "<text x=\"" << px(x + 6) << "\" y=\"" << px(y - 6) << "\" fill=\"#555555\">" << format_number(p.gsd)
        << " cm/px</text>\n";
    }
  }
  double ly = T + 10;
  for (const char* s : {"lawnmower", "non-adaptive", "adaptive", "linear"}) {
    const bool present = std::any_of(points.begin(), points.end(), [&](const auto& p) { return p.strategy == s; });
    if (!present) continue;
    o << "<circle cx=\"" << px(W - R + 16) << "\" cy=\"" << px(ly) << "\" r=\"4\" fill=\"" << strategy_color(s)
      << "\"/><text x=\"" << px(W - R + 26) << "\" y=\"" << px(ly + 4) << "\">" << s << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  auto out = open_out(path);
  out << o.str();
}

void write_paths_svg(const fs::path& path, const std::vector<PathPanel>& panels, const GroundRect& extent,
                     double h_min, double h_max) {
  constexpr double P = 280, M = 10, TITLE = 20;
  constexpr int kCols = 3;
  const int n = static_cast<int>(panels.size());
  const int rows = std::max(1, (n + kCols - 1) / kCols);
  const double W = kCols * (P + 2 * M);
  const double H = rows * (P + 2 * M + TITLE) + 40;
  const double scale = P / std::max(extent.width(), extent.height());
  const double span = h_max - h_min;

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(W) << "\" height=\"" << px(H) << "\" viewBox=\"0 0 "
    << px(W) << ' ' << px(H) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int k = 0; k < n; ++k) {
    const double ox = (k % kCols) * (P + 2 * M) + M;
    const double oy = (k / kCols) * (P + 2 * M + TITLE) + M + TITLE;
    auto X = [&](double x) { return ox + (x - extent.min_x) * scale; };
    auto Y = [&](double y) { return oy + (y - extent.min_y) * scale; };
    const MissionResult& m = *panels[k].mission;
    o << "<g>\n<text x=\"" << px(ox) << "\" y=\"" << px(oy - 6) << "\">" << xml_escape(panels[k].title) << "</text>\n";
    o << "<rect x=\"" << px(ox) << "\" y=\"" << px(oy) << "\" width=\"" << px(extent.width() * scale)
      << "\" height=\"" << px(extent.height() * scale) << "\" fill=\"#f4f1e8\" stroke=\"black\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"#999999\" stroke-width=\"0.6\" points=\"";
    for (std::size_t i = 0; i < m.visits.size(); ++i) {
      o << (i ? " " : "") << px(X(m.visits[i].wp.x)) << ',' << px(Y(m.visits[i].wp.y));
    }
    o << "\"/>\n";
    for (const VisitRecord& v : m.visits) {
      const double t = span > 0 ? (v.wp.h - h_min) / span : 1.0;
      o << "<circle cx=\"" << px(X(v.wp.x)) << "\" cy=\"" << px(Y(v.wp.y)) << "\" r=\"" << (v.depth == 0 ? 2.5 : 1.6)
        << "\" fill=\"" << altitude_color(1.0 - t) << "\"/>\n";
    }
    o << "</g>\n";
  }
  const double by = H - 24;
  o << "<text x=\"" << px(M) << "\" y=\"" << px(by + 10) << "\">altitude " << format_number(h_max) << " m</text>\n";
  for (int i = 0; i < 10; ++i) {
    o << "<rect x=\"" << px(M + 110 + i * 14) << "\" y=\"" << px(by) << "\" width=\"14\" height=\"12\" fill=\""
      << altitude_color(i / 9.0) << "\"/>\n";
  }
  o << "<text x=\"" << px(M + 260) << "\" y=\"" << px(by + 10) << "\">" << format_number(h_min) << " m</text>\n";
  o << "</svg>\n";
  auto out = open_out(path);
  out << o.str();
}

}  // namespace mrplan
