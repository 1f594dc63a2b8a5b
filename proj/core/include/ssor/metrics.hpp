#pragma once

#include <span>
#include <string_view>

#include "ssor/ordinal_model.hpp"
#include "ssor/types.hpp"

namespace ssor {

enum class TaskLoss { kAbsolute, kZeroOne, kSquared };

/// Metric names used in reports: MAE, MZE, MSE.
std::string_view metric_name(TaskLoss kind);
TaskLoss parse_metric(std::string_view name);

/// absolute |y - p|, zero-one 1[p != y], squared (y - p)^2.
double task_loss(TaskLoss kind, Label predicted, Label y, const LabelSpace& labels);

/// Threshold form of the absolute loss:
///   sum_{i<y} 1[alpha_i >= 0] + sum_{i>=y} 1[alpha_i < 0].
/// Equals |y - predict| whenever the thresholds are ordered.
double absolute_loss_decomposed(std::span<const double> alpha, Label y);

/// Mean task loss of the model over a labeled test set.
/// Throws std::invalid_argument for an empty test set.
double evaluate_metric(const OrdinalModel& model, std::span<const LabeledSample> test,
                       TaskLoss kind);

}  // namespace ssor
