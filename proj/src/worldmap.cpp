#include "mrplan/worldmap.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrplan/error.hpp"

namespace mrplan {

namespace fs = std::filesystem;
using nlohmann::json;

SemanticMap::SemanticMap(LabelGrid labels, double resolution_m, std::vector<std::string> legend, double origin_x,
                         double origin_y)
    : labels_(std::move(labels)),
      resolution_(resolution_m),
      legend_(std::move(legend)),
      origin_x_(origin_x),
      origin_y_(origin_y) {
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw Error("map resolution must be positive, got " + std::to_string(resolution_));
  }
  if (labels_.width < 1 || labels_.height < 1) {
    throw Error("map must be at least 1x1 pixels");
  }
  if (labels_.data.size() != static_cast<std::size_t>(labels_.width) * labels_.height) {
    throw Error("label buffer size does not match map dimensions");
  }
  if (legend_.empty() || legend_.size() > kMaxClasses) {
    throw Error("legend must name between 1 and 255 classes");
  }
  for (Label l : labels_.data) {
    if (l != kVoidLabel && l >= legend_.size()) {
      throw Error("label out of legend range: index " + std::to_string(l) + " with " +
                  std::to_string(legend_.size()) + " legend entries");
    }
  }
}

Label SemanticMap::class_index(const std::string& name) const {
  for (std::size_t i = 0; i < legend_.size(); ++i) {
    if (legend_[i] == name) return static_cast<Label>(i);
  }
  throw Error("unknown class name '" + name + "'");
}

StitchedMap StitchedMap::blank_like(const SemanticMap& map) {
  StitchedMap s;
  s.labels = LabelGrid(map.width_px(), map.height_px(), kVoidLabel);
  s.best_gsd.assign(s.labels.size(), kUnobserved);
  s.resolution = map.resolution();
  s.origin_x = map.origin_x();
  s.origin_y = map.origin_y();
  s.legend = map.legend();
  return s;
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  // The single whitespace byte after the last header field is consumed here.
  if (c == '#') in.unget();
  return tok;
}

int parse_header_int(const std::string& tok, const fs::path& path, const char* what) {
  if (tok.empty()) throw Error("malformed PGM header in " + path.string() + ": missing " + what);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || v < 1 || v > (1L << 30)) {
    throw Error("malformed PGM header in " + path.string() + ": bad " + what + " '" + tok + "'");
  }
  return static_cast<int>(v);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_legend(const fs::path& path, const std::vector<std::string>& legend, double resolution, double ox,
                  double oy) {
  json j;
  j["classes"] = legend;
  j["resolution_m_per_px"] = resolution;
  j["origin_x_m"] = ox;
  j["origin_y_m"] = oy;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

LabelGrid read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open raster " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5") throw Error("malformed PGM header in " + path.string() + ": expected P5, got '" + magic + "'");
  const int w = parse_header_int(next_token(in), path, "width");
  const int h = parse_header_int(next_token(in), path, "height");
  const int maxval = parse_header_int(next_token(in), path, "maxval");
  if (maxval > 255) throw Error("unsupported PGM maxval " + std::to_string(maxval) + " in " + path.string());
  LabelGrid grid(w, h, 0);
  in.read(reinterpret_cast<char*>(grid.data.data()), static_cast<std::streamsize>(grid.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(grid.data.size())) {
    throw Error("truncated PGM pixel data in " + path.string());
  }
  return grid;
}

void write_pgm(const fs::path& path, const LabelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(grid.data.data()), static_cast<std::streamsize>(grid.data.size()));
}

SemanticMap load_map(const fs::path& raster_path, const fs::path& legend_path) {
  LabelGrid grid = read_pgm(raster_path);
  const json j = read_json_file(legend_path);
  if (!j.is_object() || !j.contains("classes") || !j["classes"].is_array()) {
    throw Error("legend " + legend_path.string() + " lacks a 'classes' array");
  }
  if (!j.contains("resolution_m_per_px") || !j["resolution_m_per_px"].is_number()) {
    throw Error("legend " + legend_path.string() + " lacks numeric 'resolution_m_per_px'");
  }
  std::vector<std::string> legend;
  for (const auto& c : j["classes"]) {
    if (!c.is_string()) throw Error("legend class names must be strings in " + legend_path.string());
    legend.push_back(c.get<std::string>());
  }
  const double ox = j.value("origin_x_m", 0.0);
  const double oy = j.value("origin_y_m", 0.0);
  return SemanticMap(std::move(grid), j["resolution_m_per_px"].get<double>(), std::move(legend), ox, oy);
}

void save_map(const SemanticMap& map, const fs::path& raster_path, const fs::path& legend_path) {
  write_pgm(raster_path, map.labels());
  write_legend(legend_path, map.legend(), map.resolution(), map.origin_x(), map.origin_y());
}

LabelGrid sample_labels(const SemanticMap& map, const GroundRect& rect, int cols, int rows) {
  LabelGrid out(cols, rows, kVoidLabel);
  const double cell_w = rect.width() / cols;
  const double cell_h = rect.height() / rows;
  const double inv_res = 1.0 / map.resolution();
  std::vector<int> map_cols(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c) {
    const double x = rect.min_x + (c + 0.5) * cell_w;
    const double fc = std::floor((x - map.origin_x()) * inv_res);
    map_cols[c] = (fc >= 0.0 && fc < map.width_px()) ? static_cast<int>(fc) : -1;
  }
  for (int r = 0; r < rows; ++r) {
    const double y = rect.min_y + (r + 0.5) * cell_h;
    const double fr = std::floor((y - map.origin_y()) * inv_res);
    if (fr < 0.0 || fr >= map.height_px()) continue;
    const int mr = static_cast<int>(fr);
    for (int c = 0; c < cols; ++c) {
      if (map_cols[c] >= 0) out.at(r, c) = map.label(mr, map_cols[c]);
    }
  }
  return out;
}

LabelGrid ground_truth_patch(const SemanticMap& map, const GroundRect& rect, double out_gsd) {
  if (!(out_gsd > 0.0)) throw Error("output GSD must be positive");
  if (!rect.valid() || !intersects(rect, map.extent())) {
    throw Error("ground rect does not intersect the map extent");
  }
  const double cell = out_gsd / 100.0;
  const int cols = std::max(1, static_cast<int>(std::lround(rect.width() / cell)));
  const int rows = std::max(1, static_cast<int>(std::lround(rect.height() / cell)));
  return sample_labels(map, rect, cols, rows);
}

PixelSpan pixel_span(const GroundRect& rect, double origin_x, double origin_y, double resolution, int width,
                     int height) {
  // Pixel i is covered when its center origin + (i + 0.5) * res lies in [min, max).
  auto first = [&](double lo, double o) { return static_cast<int>(std::ceil((lo - o) / resolution - 0.5)); };
  PixelSpan s;
  s.col0 = std::max(0, first(rect.min_x, origin_x));
  s.col1 = std::min(width - 1, first(rect.max_x, origin_x) - 1);
  s.row0 = std::max(0, first(rect.min_y, origin_y));
  s.row1 = std::min(height - 1, first(rect.max_y, origin_y) - 1);
  return s;
}

void stitch(StitchedMap& stitched, const Observation& obs) {
  const int W = stitched.labels.width;
  const PixelSpan span =
      pixel_span(obs.rect, stitched.origin_x, stitched.origin_y, stitched.resolution, W, stitched.labels.height);
  if (span.empty()) return;
  const double cell_w = obs.rect.width() / obs.labels.width;
  const double cell_h = obs.rect.height() / obs.labels.height;
  std::vector<int> obs_cols(static_cast<std::size_t>(span.col1 - span.col0 + 1));
  for (int c = span.col0; c <= span.col1; ++c) {
    const double x = stitched.origin_x + (c + 0.5) * stitched.resolution;
    obs_cols[c - span.col0] = std::clamp(static_cast<int>(std::floor((x - obs.rect.min_x) / cell_w)), 0,
                                         obs.labels.width - 1);
  }
  for (int r = span.row0; r <= span.row1; ++r) {
    const double y = stitched.origin_y + (r + 0.5) * stitched.resolution;
    const int orow =
        std::clamp(static_cast<int>(std::floor((y - obs.rect.min_y) / cell_h)), 0, obs.labels.height - 1);
    const std::size_t base = static_cast<std::size_t>(r) * W;
    for (int c = span.col0; c <= span.col1; ++c) {
      const Label l = obs.labels.at(orow, obs_cols[c - span.col0]);
      if (l == kVoidLabel) continue;
      double& best = stitched.best_gsd[base + c];
      if (obs.gsd <= best) {
        best = obs.gsd;
        stitched.labels.data[base + c] = l;
      }
    }
  }
}

void write_stitched(const StitchedMap& stitched, const fs::path& labels_path, const fs::path& legend_path,
                    const fs::path& gsd_path) {
  write_pgm(labels_path, stitched.labels);
  write_legend(legend_path, stitched.legend, stitched.resolution, stitched.origin_x, stitched.origin_y);
  LabelGrid gsd(stitched.labels.width, stitched.labels.height, kVoidLabel);
  for (std::size_t i = 0; i < gsd.data.size(); ++i) {
    const double g = stitched.best_gsd[i];
    if (std::isfinite(g)) gsd.data[i] = static_cast<Label>(std::clamp(std::lround(g * 10.0), 0L, 254L));
  }
  write_pgm(gsd_path, gsd);
}

}  // namespace mrplan
