#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssor/losses.hpp"
#include "ssor/ordinal_model.hpp"
#include "ssor/types.hpp"

namespace ssor {

/// Configuration of the semi-supervised risk
///
///   gamma * (l1 + [u - l2]) + (1 - gamma) * sv  (+ the threshold penalty when training),
///
/// where [.] is max(0, .) under the non-negative correction and the identity otherwise.
struct RiskSpec {
  TaskSurrogate psi;
  /// Class k whose labeled term is replaced by the unlabeled expression.
  Label removed_class = 1;
  double gamma = 0.8;
  /// Weight of the order-constraint penalty on the thresholds.
  double mu = 10.0;
  bool non_negative = true;
  ClassPriors priors;

  /// Throws std::invalid_argument when the spec does not fit a K-class problem.
  void validate(int num_classes) const;
};

struct RiskBreakdown {
  double l1 = 0.0;  ///< sum_{y != k} pi_y/n_y sum_j psi(alpha(x_j^y), y)
  double u = 0.0;   ///< 1/n_U sum_j psi(alpha(x_j^U), k)
  double l2 = 0.0;  ///< sum_{y != k} pi_y/n_y sum_j psi(alpha(x_j^y), k)
  double sv = 0.0;  ///< 1/n_L sum_j psi(alpha(x_j), y_j)
  double total = 0.0;
};

/// pi_y = n_y / n_L. Throws std::invalid_argument on an empty labeled set.
ClassPriors estimate_priors(const OrdinalDataset& dataset);
ClassPriors estimate_priors(std::span<const LabeledSample> labeled, int num_classes);

double supervised_risk(const OrdinalModel& model, std::span<const LabeledSample> labeled,
                       const TaskSurrogate& psi);

/// Labeled-unlabeled estimator (gamma forced to 1). Requires n_U >= 1 and n_y >= 1 for
/// every y != k; otherwise throws std::invalid_argument.
RiskBreakdown lu_risk(const OrdinalModel& model, const OrdinalDataset& dataset,
                      const RiskSpec& spec);

/// Convex combination of the LU and supervised estimators. With gamma == 0 the unlabeled
/// data is never touched.
RiskBreakdown semi_risk(const OrdinalModel& model, const OrdinalDataset& dataset,
                        const RiskSpec& spec);

/// mu * max{0, sum_{i=1}^{K-2} -log(theta_{i+1} - theta_i)}; +infinity when any gap is
/// not positive. Zero for K = 2.
double threshold_penalty(std::span<const double> theta, double mu);

/// Gradient of threshold_penalty. Throws std::domain_error when the penalty is infinite.
std::vector<double> threshold_penalty_grad(std::span<const double> theta, double mu);

enum class RemovalStrategy { kSmallest, kBound, kFixed };

struct ClassSelector {
  RemovalStrategy strategy = RemovalStrategy::kBound;
  Label fixed_class = 1;
};

/// Parses "smallest", "bound" or "fixed:<k>".
ClassSelector parse_class_selector(std::string_view text);
std::string to_string(const ClassSelector& selector);

/// smallest: argmin n_y; bound: argmax n_y; fixed: the given class. Ties go to the
/// smallest index.
Label select_removed_class(std::span<const std::size_t> counts, const ClassSelector& selector);

/// Exact (sub)gradient of semi_risk.total + threshold_penalty over weights and theta.
/// Under the non-negative correction a clamped bracket (u < l2) contributes nothing.
ModelGradient risk_grad(const OrdinalModel& model, const OrdinalDataset& dataset,
                        const RiskSpec& spec);

/// Descent direction used for training. Identical to risk_grad except that when the
/// non-negative correction is on and u < l2, the bracket contributes -grad(u - l2),
/// pushing the estimate back to the non-negative region instead of stalling.
ModelGradient training_direction(const OrdinalModel& model, const OrdinalDataset& dataset,
                                 const RiskSpec& spec);

// ---------------------------------------------------------------------------------------
// Score-level evaluation. Everything above is built on these.

enum class BracketRule { kExact, kSignFlip };

/// d total / d score for every labeled and unlabeled point, and d total / d theta.
struct ScoreGradients {
  std::vector<double> labeled;
  std::vector<double> unlabeled;
  std::vector<double> theta;
};

/// Semi-supervised risk from precomputed scores f(x). When grad is non-null it is
/// resized and filled. Does not include the threshold penalty.
RiskBreakdown semi_risk_from_scores(std::span<const double> labeled_scores,
                                    std::span<const Label> labels,
                                    std::span<const double> unlabeled_scores,
                                    std::span<const double> theta, const RiskSpec& spec,
                                    ScoreGradients* grad = nullptr,
                                    BracketRule rule = BracketRule::kExact);

/// Basis expansions phi(x) of a dataset under a fixed score-model structure, so that
/// repeated evaluations only cost a matrix-vector product.
class BasisCache {
 public:
  BasisCache(const ScoreModel& structure, std::span<const LabeledSample> labeled,
             std::span<const FeatureVector> unlabeled);

  std::size_t width() const noexcept { return width_; }
  std::size_t num_labeled() const noexcept { return labels_.size(); }
  std::size_t num_unlabeled() const noexcept { return num_unlabeled_; }
  std::span<const Label> labels() const noexcept { return labels_; }

  void labeled_scores(std::span<const double> weights, std::span<double> out) const;
  void unlabeled_scores(std::span<const double> weights, std::span<double> out) const;

  /// grad_w += sum_j d_j phi(x_j) over the labeled and unlabeled rows.
  void accumulate(std::span<const double> d_labeled, std::span<const double> d_unlabeled,
                  std::span<double> grad_w) const;

 private:
  std::size_t width_;
  std::size_t num_unlabeled_;
  std::vector<Label> labels_;
  std::vector<double> labeled_phi_;
  std::vector<double> unlabeled_phi_;
};

/// Risk, penalty and gradient on a cached problem.
struct ObjectiveValue {
  RiskBreakdown risk;
  double penalty = 0.0;
};

ObjectiveValue evaluate_objective(const BasisCache& cache, const OrdinalModel& model,
                                  const RiskSpec& spec, ModelGradient* grad = nullptr,
                                  BracketRule rule = BracketRule::kExact);

// ---------------------------------------------------------------------------------------

struct ResampleSizes {
  std::size_t labeled = 30;
  std::size_t unlabeled = 1000;
};

/// Var[lu_risk.total] / Var[supervised_risk] over bootstrap draws (with replacement) of
/// labeled and unlabeled subsets of the given sizes, the model held fixed. Draws that miss
/// a class y != k are redrawn. Throws std::domain_error when the supervised variance is 0.
double variance_ratio(const OrdinalDataset& dataset, const RiskSpec& spec,
                      const OrdinalModel& model, std::size_t resamples, ResampleSizes sizes,
                      std::uint64_t seed);

}  // namespace ssor
