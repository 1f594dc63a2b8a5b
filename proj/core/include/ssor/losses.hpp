#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ssor/types.hpp"

namespace ssor {

/// Margin losses l(z) used inside threshold surrogates.
enum class BinaryLoss { kLogistic, kSquared, kHinge, kExponential, kDoubleHinge };

std::string_view to_string(BinaryLoss kind);
BinaryLoss parse_binary_loss(std::string_view name);

/// logistic log(1 + e^-z), squared (1 - z)^2, hinge max(0, 1 - z), exponential e^-z,
/// double hinge max(-z, max(0, 1/2 - z/2)).
double binary_value(BinaryLoss kind, double z);

/// dl/dz. Subgradient choices at kinks: hinge(1) = 0, double hinge(-1) = -1,
/// double hinge(1) = 0.
double binary_grad(BinaryLoss kind, double z);

/// C such that l(z) - l(-z) = -C z on the probe grid {+-0.1, +-0.5, +-1, +-2, +-5}
/// to within 1e-9, or nullopt when no positive C fits.
std::optional<double> linear_odd_constant(BinaryLoss kind);

/// Task surrogates over alpha = theta - f(x).
enum class SurrogateKind { kAllThreshold, kImmediateThreshold, kLeastSquares, kLeastAbsolute };

std::string_view to_string(SurrogateKind kind);
SurrogateKind parse_surrogate(std::string_view name);

struct TaskSurrogate {
  SurrogateKind kind = SurrogateKind::kAllThreshold;
  /// Ignored by LS and LAD.
  BinaryLoss binary = BinaryLoss::kLogistic;
};

/// AT: sum_{i<y} l(-alpha_i) + sum_{i>=y} l(alpha_i)
/// IT: l(-alpha_{y-1}) + l(alpha_y), boundary terms dropped at y = 1 and y = K
/// LS: (y + alpha_1 - 3/2)^2
/// LAD: |y + alpha_1 - 3/2|
/// Throws std::out_of_range for y outside 1..K where K = alpha.size() + 1.
double task_surrogate_value(const TaskSurrogate& psi, std::span<const double> alpha, Label y);

/// Writes d psi / d alpha into grad (same length as alpha) and returns psi.
double task_surrogate_value_grad(const TaskSurrogate& psi, std::span<const double> alpha,
                                 Label y, std::span<double> grad);

std::vector<double> task_surrogate_grad_alpha(const TaskSurrogate& psi,
                                              std::span<const double> alpha, Label y);

}  // namespace ssor
