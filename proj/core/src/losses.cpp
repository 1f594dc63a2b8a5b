#include "ssor/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ssor {

std::string_view to_string(BinaryLoss kind) {
  switch (kind) {
    case BinaryLoss::kLogistic: return "logistic";
    case BinaryLoss::kSquared: return "squared";
    case BinaryLoss::kHinge: return "hinge";
    case BinaryLoss::kExponential: return "exponential";
    case BinaryLoss::kDoubleHinge: return "double-hinge";
  }
  return "?";
}

BinaryLoss parse_binary_loss(std::string_view name) {
  if (name == "logistic") return BinaryLoss::kLogistic;
  if (name == "squared") return BinaryLoss::kSquared;
  if (name == "hinge") return BinaryLoss::kHinge;
  if (name == "exponential") return BinaryLoss::kExponential;
  if (name == "double-hinge" || name == "double_hinge") return BinaryLoss::kDoubleHinge;
  throw std::invalid_argument("unknown binary loss '" + std::string(name) + "'");
}

double binary_value(BinaryLoss kind, double z) {
  switch (kind) {
    case BinaryLoss::kLogistic:
      return std::max(0.0, -z) + std::log1p(std::exp(-std::abs(z)));
    case BinaryLoss::kSquared:
      return (1.0 - z) * (1.0 - z);
    case BinaryLoss::kHinge:
      return std::max(0.0, 1.0 - z);
    case BinaryLoss::kExponential:
      return std::exp(-z);
    case BinaryLoss::kDoubleHinge:
      return std::max(-z, std::max(0.0, 0.5 - 0.5 * z));
  }
  return 0.0;
}

double binary_grad(BinaryLoss kind, double z) {
  switch (kind) {
    case BinaryLoss::kLogistic: {
      // -sigmoid(-z), evaluated without overflow on either side.
      if (z >= 0.0) {
        const double e = std::exp(-z);
        return -e / (1.0 + e);
      }
      return -1.0 / (1.0 + std::exp(z));
    }
    case BinaryLoss::kSquared:
      return -2.0 * (1.0 - z);
    case BinaryLoss::kHinge:
      return z < 1.0 ? -1.0 : 0.0;
    case BinaryLoss::kExponential:
      return -std::exp(-z);
    case BinaryLoss::kDoubleHinge:
      if (z <= -1.0) return -1.0;
      if (z < 1.0) return -0.5;
      return 0.0;
  }
  return 0.0;
}

std::optional<double> linear_odd_constant(BinaryLoss kind) {
  static constexpr std::array<double, 5> kProbes = {0.1, 0.5, 1.0, 2.0, 5.0};
  // l(1) - l(-1) = -C fixes the candidate; every other probe must agree.
  const double c = binary_value(kind, -1.0) - binary_value(kind, 1.0);
  if (!(c > 0.0)) return std::nullopt;
  for (double p : kProbes) {
    for (double z : {p, -p}) {
      const double residual = binary_value(kind, z) - binary_value(kind, -z) + c * z;
      if (std::abs(residual) > 1e-9) return std::nullopt;
    }
  }
  return c;
}

std::string_view to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::kAllThreshold: return "at";
    case SurrogateKind::kImmediateThreshold: return "it";
    case SurrogateKind::kLeastSquares: return "ls";
    case SurrogateKind::kLeastAbsolute: return "lad";
  }
  return "?";
}

SurrogateKind parse_surrogate(std::string_view name) {
  if (name == "at" || name == "AT") return SurrogateKind::kAllThreshold;
  if (name == "it" || name == "IT") return SurrogateKind::kImmediateThreshold;
  if (name == "ls" || name == "LS") return SurrogateKind::kLeastSquares;
  if (name == "lad" || name == "LAD") return SurrogateKind::kLeastAbsolute;
  throw std::invalid_argument("unknown task surrogate '" + std::string(name) + "'");
}

namespace {

void check_label(std::span<const double> alpha, Label y) {
  const int classes = static_cast<int>(alpha.size()) + 1;
  if (alpha.empty()) throw std::invalid_argument("alpha must have length K-1 >= 1");
  if (y < 1 || y > classes) {
    throw std::out_of_range("label " + std::to_string(y) + " outside 1.." +
                            std::to_string(classes));
  }
}

}  // namespace

double task_surrogate_value_grad(const TaskSurrogate& psi, std::span<const double> alpha,
                                 Label y, std::span<double> grad) {
  check_label(alpha, y);
  std::fill(grad.begin(), grad.end(), 0.0);
  const auto yi = static_cast<std::size_t>(y);
  const std::size_t m = alpha.size();
  switch (psi.kind) {
    case SurrogateKind::kAllThreshold: {
      double value = 0.0;
      // 0-based i < y-1 are the thresholds below the label.
      for (std::size_t i = 0; i < m; ++i) {
        if (i + 1 < yi) {
          value += binary_value(psi.binary, -alpha[i]);
          grad[i] = -binary_grad(psi.binary, -alpha[i]);
        } else {
          value += binary_value(psi.binary, alpha[i]);
          grad[i] = binary_grad(psi.binary, alpha[i]);
        }
      }
      return value;
    }
    case SurrogateKind::kImmediateThreshold: {
      double value = 0.0;
      if (yi >= 2) {
        const std::size_t below = yi - 2;
        value += binary_value(psi.binary, -alpha[below]);
        grad[below] = -binary_grad(psi.binary, -alpha[below]);
      }
      if (yi <= m) {
        const std::size_t above = yi - 1;
        value += binary_value(psi.binary, alpha[above]);
        grad[above] += binary_grad(psi.binary, alpha[above]);
      }
      return value;
    }
    case SurrogateKind::kLeastSquares: {
      const double r = static_cast<double>(y) + alpha[0] - 1.5;
      grad[0] = 2.0 * r;
      return r * r;
    }
    case SurrogateKind::kLeastAbsolute: {
      const double r = static_cast<double>(y) + alpha[0] - 1.5;
      grad[0] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
      return std::abs(r);
    }
  }
  return 0.0;
}

double task_surrogate_value(const TaskSurrogate& psi, std::span<const double> alpha, Label y) {
  check_label(alpha, y);
  const auto yi = static_cast<std::size_t>(y);
  switch (psi.kind) {
    case SurrogateKind::kAllThreshold: {
      double value = 0.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        value += i + 1 < yi ? binary_value(psi.binary, -alpha[i])
                            : binary_value(psi.binary, alpha[i]);
      }
      return value;
    }
    case SurrogateKind::kImmediateThreshold: {
      double value = 0.0;
      if (yi >= 2) value += binary_value(psi.binary, -alpha[yi - 2]);
      if (yi <= alpha.size()) value += binary_value(psi.binary, alpha[yi - 1]);
      return value;
    }
    case SurrogateKind::kLeastSquares: {
      const double r = static_cast<double>(y) + alpha[0] - 1.5;
      return r * r;
    }
    case SurrogateKind::kLeastAbsolute:
      return std::abs(static_cast<double>(y) + alpha[0] - 1.5);
  }
  return 0.0;
}

std::vector<double> task_surrogate_grad_alpha(const TaskSurrogate& psi,
                                              std::span<const double> alpha, Label y) {
  std::vector<double> grad(alpha.size());
  task_surrogate_value_grad(psi, alpha, y, grad);
  return grad;
}

}  // namespace ssor
