#include "mrplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrplan/error.hpp"

namespace mrplan {

InterestSet::InterestSet(std::vector<Label> classes, std::size_t num_classes) : classes_(std::move(classes)) {
  if (classes_.empty()) throw Error("interest set must not be empty");
  for (Label l : classes_) {
    if (l == kVoidLabel || l >= num_classes) {
      throw Error("interest class index " + std::to_string(l) + " is not in the legend");
    }
    if (member_[l]) throw Error("duplicate interest class index " + std::to_string(l));
    member_[l] = true;
  }
}

double RatioCounts::ratio() const {
  if (valid == 0) throw Error("semantic ratio undefined for an all-void grid");
  return static_cast<double>(interest) / static_cast<double>(valid);
}

RatioCounts semantic_counts(const LabelGrid& grid, const InterestSet& interest) {
  RatioCounts rc;
  for (Label l : grid.data) {
    if (l == kVoidLabel) continue;
    ++rc.valid;
    if (interest.contains(l)) ++rc.interest;
  }
  return rc;
}

double semantic_ratio(const LabelGrid& grid, const InterestSet& interest) {
  return semantic_counts(grid, interest).ratio();
}

std::uint64_t ConfusionMatrix::row_sum(Label gt) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < n_; ++p) s += counts_[gt * n_ + p];
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(Label pred) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < n_; ++g) s += counts_[g * n_ + pred];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  if (o.n_ != n_) throw Error("confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  return *this;
}

ConfusionMatrix confusion(const LabelGrid& pred, const LabelGrid& gt, std::size_t num_classes) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw Error("confusion: dimension mismatch " + std::to_string(pred.width) + "x" + std::to_string(pred.height) +
                " vs " + std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const Label p = pred.data[i];
    const Label g = gt.data[i];
    if (p == kVoidLabel || g == kVoidLabel) continue;
    if (p >= num_classes || g >= num_classes) throw Error("confusion: label outside legend");
    cm.add(g, p);
  }
  return cm;
}

MiouResult miou(const ConfusionMatrix& cm, const InterestSet& interest) {
  MiouResult r;
  r.per_class.reserve(interest.size());
  double sum = 0.0;
  int counted = 0;
  for (Label l : interest.classes()) {
    if (l >= cm.num_classes()) {
      r.per_class.emplace_back(std::nullopt);
      continue;
    }
    const std::uint64_t inter = cm.at(l, l);
    const std::uint64_t uni = cm.row_sum(l) + cm.col_sum(l) - inter;
    if (uni == 0) {
      r.per_class.emplace_back(std::nullopt);
      continue;
    }
    const double iou = static_cast<double>(inter) / static_cast<double>(uni);
    r.per_class.emplace_back(iou);
    sum += iou;
    ++counted;
  }
  if (counted > 0) {
    r.value = sum / counted;
    r.vacuous = false;
  }
  return r;
}

ConfusionMatrix observation_confusion(const SemanticMap& map, const Observation& obs) {
  ConfusionMatrix cm(map.num_classes());
  const PixelSpan span =
      pixel_span(obs.rect, map.origin_x(), map.origin_y(), map.resolution(), map.width_px(), map.height_px());
  if (span.empty()) return cm;
  const double cell_w = obs.rect.width() / obs.labels.width;
  const double cell_h = obs.rect.height() / obs.labels.height;
  std::vector<int> obs_cols(static_cast<std::size_t>(span.col1 - span.col0 + 1));
  for (int c = span.col0; c <= span.col1; ++c) {
    const double x = map.origin_x() + (c + 0.5) * map.resolution();
    obs_cols[c - span.col0] =
        std::clamp(static_cast<int>(std::floor((x - obs.rect.min_x) / cell_w)), 0, obs.labels.width - 1);
  }
  const std::size_t n = map.num_classes();
  for (int r = span.row0; r <= span.row1; ++r) {
    const double y = map.origin_y() + (r + 0.5) * map.resolution();
    const int orow =
        std::clamp(static_cast<int>(std::floor((y - obs.rect.min_y) / cell_h)), 0, obs.labels.height - 1);
    for (int c = span.col0; c <= span.col1; ++c) {
      const Label g = map.label(r, c);
      const Label p = obs.labels.at(orow, obs_cols[c - span.col0]);
      if (g == kVoidLabel || p == kVoidLabel || p >= n) continue;
      cm.add(g, p);
    }
  }
  return cm;
}

}  // namespace mrplan
