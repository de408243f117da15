#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mrplan/worldmap.hpp"

namespace mrplan {

// Classes targeted for fine-grained mapping.
class InterestSet {
public:
  InterestSet(std::vector<Label> classes, std::size_t num_classes);

  const std::vector<Label>& classes() const { return classes_; }
  bool contains(Label l) const { return member_[l]; }
  std::size_t size() const { return classes_.size(); }

private:
  std::vector<Label> classes_;
  std::array<bool, 256> member_{};
};

// Pixel tallies behind a semantic ratio, so that ratios can be pooled.
struct RatioCounts {
  std::uint64_t interest = 0;
  std::uint64_t valid = 0;

  RatioCounts& operator+=(const RatioCounts& o) {
    interest += o.interest;
    valid += o.valid;
    return *this;
  }
  // Throws when no valid pixels were counted.
  double ratio() const;
};

RatioCounts semantic_counts(const LabelGrid& grid, const InterestSet& interest);

// Fraction of non-void pixels that carry an interest class.
double semantic_ratio(const LabelGrid& grid, const InterestSet& interest);

// Counts of (ground truth, predicted) pairs over jointly non-void pixels.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(std::size_t num_classes)
      : n_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const { return n_; }
  std::uint64_t at(Label gt, Label pred) const { return counts_[gt * n_ + pred]; }
  void add(Label gt, Label pred, std::uint64_t k = 1) { counts_[gt * n_ + pred] += k; }
  std::uint64_t row_sum(Label gt) const;
  std::uint64_t col_sum(Label pred) const;
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;

private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(const LabelGrid& pred, const LabelGrid& gt, std::size_t num_classes);

struct MiouResult {
  double value = 1.0;
  // True when no interest class appeared in either prediction or ground truth.
  bool vacuous = true;
  // IoU per interest class, in InterestSet order; nullopt when the union is empty.
  std::vector<std::optional<double>> per_class;
};

// Mean IoU over the interest classes with a non-empty union.
MiouResult miou(const ConfusionMatrix& cm, const InterestSet& interest);

// Confusion of an observation against the map's native-resolution labels
// over the observation footprint: each map pixel is compared with the
// observation cell it falls in.
ConfusionMatrix observation_confusion(const SemanticMap& map, const Observation& obs);

}  // namespace mrplan
