#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssor {

/// Ordinal labels are 1-based: 1..K.
using Label = int;
using FeatureVector = std::vector<double>;

/// Thresholds theta_1..theta_{K-1}. Ordering is not enforced at construction.
using ThresholdVector = std::vector<double>;

/// alpha_i = theta_i - f(x), i = 1..K-1.
using AlphaVector = std::vector<double>;

/// The ordered label space {1, ..., K}, K >= 2.
class LabelSpace {
 public:
  explicit LabelSpace(int num_classes);

  int num_classes() const noexcept { return num_classes_; }
  int num_thresholds() const noexcept { return num_classes_ - 1; }
  bool contains(Label y) const noexcept { return y >= 1 && y <= num_classes_; }

  /// Throws std::out_of_range when y is not in 1..K.
  void check(Label y) const;

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  int num_classes_;
};

struct LabeledSample {
  FeatureVector x;
  Label y;
};

/// Labeled pairs plus unlabeled inputs over a common feature dimension.
class OrdinalDataset {
 public:
  OrdinalDataset(LabelSpace labels, std::size_t dim,
                 std::vector<LabeledSample> labeled,
                 std::vector<FeatureVector> unlabeled);

  const LabelSpace& labels() const noexcept { return labels_; }
  int num_classes() const noexcept { return labels_.num_classes(); }
  std::size_t dim() const noexcept { return dim_; }

  const std::vector<LabeledSample>& labeled() const noexcept { return labeled_; }
  const std::vector<FeatureVector>& unlabeled() const noexcept { return unlabeled_; }
  std::size_t num_labeled() const noexcept { return labeled_.size(); }
  std::size_t num_unlabeled() const noexcept { return unlabeled_.size(); }

  /// n_y for y = 1..K, stored at index y-1.
  std::vector<std::size_t> class_counts() const;

 private:
  LabelSpace labels_;
  std::size_t dim_;
  std::vector<LabeledSample> labeled_;
  std::vector<FeatureVector> unlabeled_;
};

/// Class priors pi_1..pi_K: non-negative, summing to one.
class ClassPriors {
 public:
  explicit ClassPriors(std::vector<double> pi);

  /// pi_y for a 1-based label.
  double operator[](Label y) const { return pi_.at(static_cast<std::size_t>(y - 1)); }
  int num_classes() const noexcept { return static_cast<int>(pi_.size()); }
  std::span<const double> values() const noexcept { return pi_; }

 private:
  std::vector<double> pi_;
};

}  // namespace ssor
