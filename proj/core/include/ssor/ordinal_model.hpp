#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssor/score_model.hpp"
#include "ssor/types.hpp"

namespace ssor {

/// Threshold model g(x; f, theta) = 1 + #{i : f(x) > theta_i}.
struct OrdinalModel {
  ScoreModel score;
  ThresholdVector theta;

  int num_classes() const noexcept { return static_cast<int>(theta.size()) + 1; }
  LabelSpace labels() const { return LabelSpace(num_classes()); }
};

/// Label from a precomputed score. A tie f == theta_i does not cross theta_i.
Label predict_from_score(double f, std::span<const double> theta);

Label predict(const OrdinalModel& model, std::span<const double> x);

AlphaVector alpha_from_score(double f, std::span<const double> theta);

AlphaVector alpha(const OrdinalModel& model, std::span<const double> x);

/// True when theta_1 <= ... <= theta_{K-1}.
bool thresholds_ordered(std::span<const double> theta) noexcept;
bool thresholds_strictly_increasing(std::span<const double> theta) noexcept;

/// Zero weights and thresholds theta_i = -1 + 2i/K.
OrdinalModel init_model(ScoreModel score, int num_classes);

/// Gradient (or any direction) over the trainable parameters of an OrdinalModel.
struct ModelGradient {
  std::vector<double> weights;
  std::vector<double> theta;
};

/// Flat parameter view [weights..., theta...] used by optimizers and gradient checks.
std::vector<double> pack_parameters(const OrdinalModel& model);
void unpack_parameters(std::span<const double> params, OrdinalModel& model);
std::vector<double> pack_gradient(const ModelGradient& grad);

/// Line-oriented text format, one record per line:
///
///   kind,<linear|kernel>
///   d,<dim>
///   K,<classes>
///   theta,<theta_1>,...
///   weights,<w_1>,...
///   sigma,<bandwidth>        (kernel only)
///   center,<c_1>,...         (kernel only, one line per center)
///
/// Reals are written in shortest round-trip form, so save/load is bit-exact.
void save_model(const OrdinalModel& model, std::ostream& out);
OrdinalModel load_model(std::istream& in);

void save_model_file(const OrdinalModel& model, const std::string& path);
OrdinalModel load_model_file(const std::string& path);

}  // namespace ssor
