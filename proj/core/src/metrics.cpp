#include "ssor/metrics.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ssor {

std::string_view metric_name(TaskLoss kind) {
  switch (kind) {
    case TaskLoss::kAbsolute: return "MAE";
    case TaskLoss::kZeroOne: return "MZE";
    case TaskLoss::kSquared: return "MSE";
  }
  return "?";
}

TaskLoss parse_metric(std::string_view name) {
  if (name == "MAE" || name == "mae" || name == "absolute") return TaskLoss::kAbsolute;
  if (name == "MZE" || name == "mze" || name == "zero_one") return TaskLoss::kZeroOne;
  if (name == "MSE" || name == "mse" || name == "squared") return TaskLoss::kSquared;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

double task_loss(TaskLoss kind, Label predicted, Label y, const LabelSpace& labels) {
  labels.check(predicted);
  labels.check(y);
  const int diff = y - predicted;
  switch (kind) {
    case TaskLoss::kAbsolute: return std::abs(diff);
    case TaskLoss::kZeroOne: return diff != 0 ? 1.0 : 0.0;
    case TaskLoss::kSquared: return static_cast<double>(diff) * diff;
  }
  return 0.0;
}

double absolute_loss_decomposed(std::span<const double> alpha, Label y) {
  const int thresholds = static_cast<int>(alpha.size());
  if (y < 1 || y > thresholds + 1) {
    throw std::out_of_range("label " + std::to_string(y) + " outside 1.." +
                            std::to_string(thresholds + 1));
  }
  double loss = 0.0;
  for (int i = 1; i <= thresholds; ++i) {
    const double a = alpha[static_cast<std::size_t>(i - 1)];
    if (i < y) {
      loss += a >= 0.0 ? 1.0 : 0.0;
    } else {
      loss += a < 0.0 ? 1.0 : 0.0;
    }
  }
  return loss;
}

double evaluate_metric(const OrdinalModel& model, std::span<const LabeledSample> test,
                       TaskLoss kind) {
  if (test.empty()) throw std::invalid_argument("evaluate_metric: empty test set");
  const LabelSpace labels = model.labels();
  double total = 0.0;
  for (const auto& s : test) total += task_loss(kind, predict(model, s.x), s.y, labels);
  return total / static_cast<double>(test.size());
}

}  // namespace ssor
