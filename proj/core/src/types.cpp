#include "ssor/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssor {

LabelSpace::LabelSpace(int num_classes) : num_classes_(num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument("label space needs K >= 2, got " + std::to_string(num_classes));
  }
}

void LabelSpace::check(Label y) const {
  if (!contains(y)) {
    throw std::out_of_range("label " + std::to_string(y) + " outside 1.." +
                            std::to_string(num_classes_));
  }
}

OrdinalDataset::OrdinalDataset(LabelSpace labels, std::size_t dim,
                               std::vector<LabeledSample> labeled,
                               std::vector<FeatureVector> unlabeled)
    : labels_(labels),
      dim_(dim),
      labeled_(std::move(labeled)),
      unlabeled_(std::move(unlabeled)) {
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be >= 1");
  for (std::size_t i = 0; i < labeled_.size(); ++i) {
    if (labeled_[i].x.size() != dim_) {
      throw std::invalid_argument("labeled row " + std::to_string(i) + " has dimension " +
                                  std::to_string(labeled_[i].x.size()) + ", expected " +
                                  std::to_string(dim_));
    }
    labels_.check(labeled_[i].y);
  }
  for (std::size_t i = 0; i < unlabeled_.size(); ++i) {
    if (unlabeled_[i].size() != dim_) {
      throw std::invalid_argument("unlabeled row " + std::to_string(i) + " has dimension " +
                                  std::to_string(unlabeled_[i].size()) + ", expected " +
                                  std::to_string(dim_));
    }
  }
}

std::vector<std::size_t> OrdinalDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(labels_.num_classes()), 0);
  for (const auto& s : labeled_) ++counts[static_cast<std::size_t>(s.y - 1)];
  return counts;
}

ClassPriors::ClassPriors(std::vector<double> pi) : pi_(std::move(pi)) {
  if (pi_.size() < 2) throw std::invalid_argument("class priors need K >= 2 entries");
  double sum = 0.0;
  for (double p : pi_) {
    if (!(p >= 0.0) || p > 1.0) {
      throw std::invalid_argument("class prior outside [0, 1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("class priors sum to " + std::to_string(sum) + ", not 1");
  }
}

}  // namespace ssor
