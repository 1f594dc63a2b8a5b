#include "ssor/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ssor {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "kernel";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "kernel") return ModelKind::kKernel;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

ScoreModel::ScoreModel(ModelKind kind, std::size_t dim, std::vector<double> weights,
                       std::vector<FeatureVector> centers, double bandwidth)
    : kind_(kind),
      dim_(dim),
      weights_(std::move(weights)),
      centers_(std::move(centers)),
      bandwidth_(bandwidth) {}

ScoreModel ScoreModel::linear(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("linear model needs dim >= 1");
  return ScoreModel(ModelKind::kLinear, dim, std::vector<double>(dim + 1, 0.0), {}, 0.0);
}

ScoreModel ScoreModel::kernel(std::vector<FeatureVector> centers, double bandwidth) {
  if (centers.empty()) throw std::invalid_argument("kernel model needs at least one center");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("kernel bandwidth must be positive and finite");
  }
  const std::size_t dim = centers.front().size();
  if (dim == 0) throw std::invalid_argument("kernel centers must have dim >= 1");
  for (const auto& c : centers) {
    if (c.size() != dim) throw std::invalid_argument("kernel centers have mixed dimensions");
  }
  std::vector<double> weights(centers.size(), 0.0);
  return ScoreModel(ModelKind::kKernel, dim, std::move(weights), std::move(centers), bandwidth);
}

void ScoreModel::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) {
    throw std::invalid_argument("weight vector has length " + std::to_string(weights.size()) +
                                ", expected " + std::to_string(weights_.size()));
  }
  weights_ = std::move(weights);
}

void ScoreModel::basis(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(dim_));
  }
  if (kind_ == ModelKind::kLinear) {
    std::copy(x.begin(), x.end(), out.begin());
    out[dim_] = 1.0;
    return;
  }
  const double scale = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double diff = x[j] - centers_[i][j];
      dist2 += diff * diff;
    }
    out[i] = std::exp(-dist2 * scale);
  }
}

std::vector<double> ScoreModel::basis(std::span<const double> x) const {
  std::vector<double> phi(weights_.size());
  basis(x, phi);
  return phi;
}

double ScoreModel::score(std::span<const double> x) const {
  const auto phi = basis(x);
  double f = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) f += weights_[i] * phi[i];
  return f;
}

std::vector<double> median_bandwidth_candidates(std::span<const FeatureVector> inputs) {
  if (inputs.size() < 2) {
    throw std::invalid_argument("bandwidth heuristic needs at least two inputs");
  }
  std::vector<double> dists;
  dists.reserve(inputs.size() * (inputs.size() - 1) / 2);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = i + 1; j < inputs.size(); ++j) {
      if (inputs[i].size() != inputs[j].size()) {
        throw std::invalid_argument("bandwidth heuristic: inputs have mixed dimensions");
      }
      double d2 = 0.0;
      for (std::size_t t = 0; t < inputs[i].size(); ++t) {
        const double diff = inputs[i][t] - inputs[j][t];
        d2 += diff * diff;
      }
      dists.push_back(std::sqrt(d2));
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t n = dists.size();
  const double median = n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
  if (!(median > 0.0)) {
    throw std::invalid_argument("bandwidth heuristic: median pairwise distance is zero");
  }
  std::vector<double> out;
  out.reserve(kBandwidthFactors.size());
  for (double factor : kBandwidthFactors) out.push_back(factor * median);
  return out;
}

}  // namespace ssor
