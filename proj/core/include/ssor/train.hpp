#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssor/ordinal_model.hpp"
#include "ssor/risk.hpp"
#include "ssor/types.hpp"

namespace ssor {

struct TrainConfig {
  double learning_rate = 0.01;
  int patience = 20;
  /// L2 decay on the score weights (bias included); thresholds are not decayed.
  double weight_decay = 0.0;
  int max_epochs = 2000;
  std::uint64_t seed = 0;
  /// Return the best-validation parameters (true) or the final ones (false).
  bool restore_best = true;

  void validate() const;
};

struct CurvePoint {
  int epoch;
  double value;
};

struct FitReport {
  OrdinalModel model;
  /// Objective (risk + threshold penalty + weight decay) after each epoch; epoch 0 is
  /// the initial model.
  std::vector<CurvePoint> train_curve;
  std::vector<CurvePoint> val_curve;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double best_val = 0.0;
  std::vector<std::string> warnings;
};

/// Full-batch gradient descent on the semi-supervised risk plus threshold penalty.
///
/// Each epoch takes one step along training_direction + weight_decay * w, then scores
/// the semi-supervised risk of `validation` (its labeled part plus its unlabeled part).
/// Training stops once the validation risk has not improved for `patience` epochs.
///
/// Throws std::invalid_argument when the initial thresholds are infeasible and
/// std::runtime_error when the objective stops being finite. When `log` is given, one
/// CSV line `epoch,objective,val_risk` is written per epoch.
FitReport fit(const OrdinalDataset& train, const OrdinalDataset& validation,
              const RiskSpec& spec, const TrainConfig& config, const OrdinalModel& initial,
              std::ostream* log = nullptr);

/// Candidate values searched by select_hyperparams. An empty bandwidth list selects the
/// linear model.
struct HyperGrid {
  std::vector<double> bandwidths;
  std::vector<double> weight_decays = {0.1, 0.01, 0.001};
};

struct Selection {
  double bandwidth = 0.0;  ///< 0 for linear models.
  double weight_decay = 0.0;
  double validation_risk = 0.0;
  /// Refit of the winning grid point on all training data.
  FitReport report;
};

/// 2:1 hold-out model selection. The labeled part of `dataset` is split at random into
/// a training part and a validation part (each must contain every class other than the
/// removed one, up to 10 reshuffles). Every grid point is trained on the first part and
/// scored on the second together with all unlabeled inputs; the first grid point with the
/// lowest validation risk wins and is retrained on all labeled data for as many epochs as
/// it needed during selection. Kernel centers are the labeled inputs of the data the
/// model is trained on. `log` receives the epoch lines of the final refit.
Selection select_hyperparams(const OrdinalDataset& dataset, const RiskSpec& spec,
                             const TrainConfig& config, const HyperGrid& grid,
                             std::ostream* log = nullptr);

}  // namespace ssor
