#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ssor/types.hpp"

namespace ssor {

enum class ModelKind { kLinear, kKernel };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// A score function f(x) = w . phi(x) that is linear in its trainable weights.
///
/// linear: phi(x) = (x_1, ..., x_d, 1); the last weight is the bias.
/// kernel: phi(x)_i = exp(-|x - c_i|^2 / (2 sigma^2)) over fixed centers c_i.
///
/// Only the weights are trained. Centers and bandwidth are fixed at construction.
class ScoreModel {
 public:
  static ScoreModel linear(std::size_t dim);
  static ScoreModel kernel(std::vector<FeatureVector> centers, double bandwidth);

  ModelKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return dim_; }
  std::size_t num_weights() const noexcept { return weights_.size(); }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }
  void set_weights(std::vector<double> weights);

  /// Kernel-only accessors; empty / zero for linear models.
  const std::vector<FeatureVector>& centers() const noexcept { return centers_; }
  double bandwidth() const noexcept { return bandwidth_; }

  /// phi(x), which is also df/dw. Throws std::invalid_argument on dimension mismatch.
  std::vector<double> basis(std::span<const double> x) const;
  void basis(std::span<const double> x, std::span<double> out) const;

  double score(std::span<const double> x) const;

 private:
  ScoreModel(ModelKind kind, std::size_t dim, std::vector<double> weights,
             std::vector<FeatureVector> centers, double bandwidth);

  ModelKind kind_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<FeatureVector> centers_;
  double bandwidth_ = 0.0;
};

inline double score(const ScoreModel& model, std::span<const double> x) {
  return model.score(x);
}

inline std::vector<double> score_grad_params(const ScoreModel& model,
                                             std::span<const double> x) {
  return model.basis(x);
}

/// Multipliers applied to the median pairwise distance to form bandwidth candidates.
inline constexpr std::array<double, 6> kBandwidthFactors = {0.125, 0.25, 0.5, 1.0, 1.5, 2.0};

/// {1/8, 1/4, 1/2, 1, 3/2, 2} times the median Euclidean distance over pairs i < j.
/// Throws std::invalid_argument for fewer than two inputs or a zero median.
std::vector<double> median_bandwidth_candidates(std::span<const FeatureVector> inputs);

}  // namespace ssor
