#include "ssor/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ssor {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw std::invalid_argument("weight decay must be finite and >= 0");
  }
}

namespace {

std::span<const FeatureVector> unlabeled_if_used(const OrdinalDataset& d, const RiskSpec& spec) {
  // The supervised estimator never reads unlabeled inputs.
  if (spec.gamma > 0.0) return d.unlabeled();
  return {};
}

double squared_norm(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

}  // namespace

FitReport fit(const OrdinalDataset& train, const OrdinalDataset& validation,
              const RiskSpec& spec, const TrainConfig& config, const OrdinalModel& initial,
              std::ostream* log) {
  config.validate();
  spec.validate(train.num_classes());
  if (validation.num_classes() != train.num_classes()) {
    throw std::invalid_argument("validation set has a different number of classes");
  }
  if (validation.num_labeled() == 0) throw std::invalid_argument("validation set is empty");
  if (initial.num_classes() != train.num_classes() ||
      initial.score.input_dim() != train.dim()) {
    throw std::invalid_argument("initial model does not match the training data");
  }
  if (!std::isfinite(threshold_penalty(initial.theta, spec.mu))) {
    throw std::invalid_argument("initial thresholds are not strictly increasing; the order "
                                "penalty is infinite");
  }

  const BasisCache train_cache(initial.score, train.labeled(), unlabeled_if_used(train, spec));
  const BasisCache val_cache(initial.score, validation.labeled(),
                             unlabeled_if_used(validation, spec));
  const double lr = config.learning_rate;
  const double decay = config.weight_decay;

  auto objective_of = [&](const OrdinalModel& m) {
    const auto v = evaluate_objective(train_cache, m, spec);
    return v.risk.total + v.penalty + 0.5 * decay * squared_norm(m.score.weights());
  };
  auto val_of = [&](const OrdinalModel& m) {
    return evaluate_objective(val_cache, m, spec).risk.total;
  };

  FitReport report{initial, {}, {}, 0, 0, 0.0, {}};
  OrdinalModel model = initial;
  double objective = objective_of(model);
  double val = val_of(model);
  report.train_curve.push_back({0, objective});
  report.val_curve.push_back({0, val});
  if (log != nullptr) *log << 0 << ',' << objective << ',' << val << '\n';
  report.best_val = val;
  int since_best = 0;

  ModelGradient grad;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    evaluate_objective(train_cache, model, spec, &grad, BracketRule::kSignFlip);
    auto w = model.score.weights();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * (grad.weights[i] + decay * w[i]);
    for (std::size_t i = 0; i < model.theta.size(); ++i) model.theta[i] -= lr * grad.theta[i];

    objective = objective_of(model);
    val = val_of(model);
    if (!std::isfinite(objective) || !std::isfinite(val)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << ": objective " << objective
          << ", validation risk " << val;
      throw std::runtime_error(msg.str());
    }
    report.train_curve.push_back({epoch, objective});
    report.val_curve.push_back({epoch, val});
    if (log != nullptr) *log << epoch << ',' << objective << ',' << val << '\n';
    report.stopped_epoch = epoch;

    if (val < report.best_val) {
      report.best_val = val;
      report.best_epoch = epoch;
      since_best = 0;
      if (config.restore_best) report.model = model;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (!config.restore_best) report.model = model;

  if (!thresholds_ordered(report.model.theta)) {
    report.warnings.push_back("trained thresholds are not ordered");
  } else if (spec.mu > 0.0 && !thresholds_strictly_increasing(report.model.theta)) {
    report.warnings.push_back("trained thresholds are not strictly increasing");
  }
  return report;
}

namespace {

struct HoldOut {
  std::vector<LabeledSample> fit_part;
  std::vector<LabeledSample> val_part;
};

bool covers_required_classes(const std::vector<LabeledSample>& rows, int num_classes,
                             const RiskSpec& spec) {
  if (rows.empty()) return false;
  if (spec.gamma == 0.0) return true;
  std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
  for (const auto& r : rows) seen[static_cast<std::size_t>(r.y - 1)] = true;
  for (int y = 1; y <= num_classes; ++y) {
    if (y != spec.removed_class && !seen[static_cast<std::size_t>(y - 1)]) return false;
  }
  return true;
}

HoldOut split_two_to_one(const OrdinalDataset& dataset, const RiskSpec& spec,
                         std::uint64_t seed) {
  const auto& labeled = dataset.labeled();
  const std::size_t n = labeled.size();
  if (n < 3) throw std::invalid_argument("hold-out selection needs at least 3 labeled samples");
  const std::size_t n_fit = (2 * n + 1) / 3;
  constexpr int kAttempts = 10;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::shuffle(order.begin(), order.end(), rng);
    HoldOut h;
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_fit ? h.fit_part : h.val_part).push_back(labeled[order[i]]);
    }
    if (covers_required_classes(h.fit_part, dataset.num_classes(), spec) &&
        covers_required_classes(h.val_part, dataset.num_classes(), spec)) {
      return h;
    }
  }
  throw std::runtime_error("could not split the labeled data 2:1 with every class other "
                           "than the removed one on both sides (10 attempts)");
}

OrdinalModel initial_model(const std::vector<LabeledSample>& rows, std::size_t dim,
                           int num_classes, double bandwidth) {
  if (bandwidth <= 0.0) return init_model(ScoreModel::linear(dim), num_classes);
  std::vector<FeatureVector> centers;
  centers.reserve(rows.size());
  for (const auto& r : rows) centers.push_back(r.x);
  return init_model(ScoreModel::kernel(std::move(centers), bandwidth), num_classes);
}

}  // namespace

Selection select_hyperparams(const OrdinalDataset& dataset, const RiskSpec& spec,
                             const TrainConfig& config, const HyperGrid& grid,
                             std::ostream* log) {
  if (grid.weight_decays.empty()) throw std::invalid_argument("weight-decay grid is empty");
  for (double s : grid.bandwidths) {
    if (!(s > 0.0)) throw std::invalid_argument("bandwidth candidates must be positive");
  }
  const HoldOut h = split_two_to_one(dataset, spec, config.seed);
  const int classes = dataset.num_classes();
  const OrdinalDataset fit_data(dataset.labels(), dataset.dim(), h.fit_part, dataset.unlabeled());
  const OrdinalDataset val_data(dataset.labels(), dataset.dim(), h.val_part, dataset.unlabeled());

  const std::vector<double> bandwidths =
      grid.bandwidths.empty() ? std::vector<double>{0.0} : grid.bandwidths;

  bool have_best = false;
  double best_bandwidth = 0.0;
  double best_decay = 0.0;
  double best_risk = 0.0;
  int best_epochs = 0;
  for (double bandwidth : bandwidths) {
    const OrdinalModel start = initial_model(h.fit_part, dataset.dim(), classes, bandwidth);
    for (double decay : grid.weight_decays) {
      TrainConfig c = config;
      c.weight_decay = decay;
      const FitReport r = fit(fit_data, val_data, spec, c, start);
      if (!have_best || r.best_val < best_risk) {
        have_best = true;
        best_bandwidth = bandwidth;
        best_decay = decay;
        best_risk = r.best_val;
        best_epochs = r.best_epoch;
      }
    }
  }

  TrainConfig refit_config = config;
  refit_config.weight_decay = best_decay;
  refit_config.max_epochs = std::max(1, best_epochs);
  refit_config.patience = refit_config.max_epochs + 1;
  refit_config.restore_best = false;
  const OrdinalModel start =
      initial_model(dataset.labeled(), dataset.dim(), classes, best_bandwidth);
  FitReport refit = fit(dataset, val_data, spec, refit_config, start, log);
  return Selection{best_bandwidth, best_decay, best_risk, std::move(refit)};
}

}  // namespace ssor
