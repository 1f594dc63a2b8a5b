#include "ssor/risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace ssor {

void RiskSpec::validate(int num_classes) const {
  if (priors.num_classes() != num_classes) {
    throw std::invalid_argument("risk spec has " + std::to_string(priors.num_classes()) +
                                " class priors for a " + std::to_string(num_classes) +
                                "-class problem");
  }
  if (removed_class < 1 || removed_class > num_classes) {
    throw std::invalid_argument("removed class " + std::to_string(removed_class) +
                                " outside 1.." + std::to_string(num_classes));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mu must be finite and >= 0, got " + std::to_string(mu));
  }
}

ClassPriors estimate_priors(std::span<const LabeledSample> labeled, int num_classes) {
  if (labeled.empty()) throw std::invalid_argument("cannot estimate priors: no labeled data");
  const LabelSpace labels(num_classes);
  std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
  for (const auto& s : labeled) {
    labels.check(s.y);
    counts[static_cast<std::size_t>(s.y - 1)] += 1.0;
  }
  const double n = static_cast<double>(labeled.size());
  for (double& c : counts) c /= n;
  return ClassPriors(std::move(counts));
}

ClassPriors estimate_priors(const OrdinalDataset& dataset) {
  return estimate_priors(dataset.labeled(), dataset.num_classes());
}

double supervised_risk(const OrdinalModel& model, std::span<const LabeledSample> labeled,
                       const TaskSurrogate& psi) {
  if (labeled.empty()) throw std::invalid_argument("supervised risk: empty labeled set");
  double sum = 0.0;
  for (const auto& s : labeled) {
    sum += task_surrogate_value(psi, alpha(model, s.x), s.y);
  }
  return sum / static_cast<double>(labeled.size());
}

RiskBreakdown semi_risk_from_scores(std::span<const double> labeled_scores,
                                    std::span<const Label> labels,
                                    std::span<const double> unlabeled_scores,
                                    std::span<const double> theta, const RiskSpec& spec,
                                    ScoreGradients* grad, BracketRule rule) {
  const int num_classes = static_cast<int>(theta.size()) + 1;
  spec.validate(num_classes);
  if (labeled_scores.size() != labels.size()) {
    throw std::invalid_argument("labeled scores and labels differ in length");
  }
  const std::size_t n_l = labels.size();
  if (n_l == 0) throw std::invalid_argument("risk needs at least one labeled sample");

  const LabelSpace label_space(num_classes);
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (Label y : labels) {
    label_space.check(y);
    ++counts[static_cast<std::size_t>(y - 1)];
  }

  const Label k = spec.removed_class;
  const double gamma = spec.gamma;
  const bool use_lu = gamma > 0.0;
  if (use_lu) {
    if (unlabeled_scores.empty()) {
      throw std::invalid_argument("LU risk needs at least one unlabeled sample");
    }
    for (int y = 1; y <= num_classes; ++y) {
      if (y != k && counts[static_cast<std::size_t>(y - 1)] == 0) {
        throw std::invalid_argument("LU risk: class " + std::to_string(y) +
                                    " has no labeled samples and is not the removed class " +
                                    std::to_string(k));
      }
    }
  }

  // pi_y / n_y for every class except k.
  std::vector<double> coef(static_cast<std::size_t>(num_classes), 0.0);
  for (int y = 1; y <= num_classes; ++y) {
    const auto idx = static_cast<std::size_t>(y - 1);
    if (y != k && counts[idx] > 0) coef[idx] = spec.priors[y] / static_cast<double>(counts[idx]);
  }

  const std::size_t m = theta.size();
  const double w_sv = 1.0 / static_cast<double>(n_l);
  std::vector<double> a(m), g(m);

  std::vector<double> s2;
  std::vector<double> theta_l2, theta_u;
  if (grad != nullptr) {
    grad->labeled.assign(n_l, 0.0);
    grad->unlabeled.assign(use_lu ? unlabeled_scores.size() : 0, 0.0);
    grad->theta.assign(m, 0.0);
    s2.assign(n_l, 0.0);
    theta_l2.assign(m, 0.0);
    theta_u.assign(m, 0.0);
  }

  RiskBreakdown r;
  double sv_sum = 0.0;
  for (std::size_t j = 0; j < n_l; ++j) {
    const double f = labeled_scores[j];
    const Label y = labels[j];
    for (std::size_t i = 0; i < m; ++i) a[i] = theta[i] - f;
    const bool in_lu = use_lu && y != k;
    const double c = coef[static_cast<std::size_t>(y - 1)];

    if (grad == nullptr) {
      const double psi_y = task_surrogate_value(spec.psi, a, y);
      sv_sum += psi_y;
      if (in_lu) {
        r.l1 += c * psi_y;
        r.l2 += c * task_surrogate_value(spec.psi, a, k);
      }
      continue;
    }

    const double psi_y = task_surrogate_value_grad(spec.psi, a, y, g);
    sv_sum += psi_y;
    double w1 = (1.0 - gamma) * w_sv;
    if (in_lu) {
      r.l1 += c * psi_y;
      w1 += gamma * c;
    }
    double s1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s1 += g[i];
      grad->theta[i] += w1 * g[i];
    }
    grad->labeled[j] = -w1 * s1;

    if (in_lu) {
      const double psi_k = task_surrogate_value_grad(spec.psi, a, k, g);
      r.l2 += c * psi_k;
      double sum_g = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sum_g += g[i];
        theta_l2[i] += gamma * c * g[i];
      }
      s2[j] = gamma * c * sum_g;
    }
  }
  r.sv = sv_sum * w_sv;

  if (!use_lu) {
    r.total = r.sv;
    return r;
  }

  const double w_u = 1.0 / static_cast<double>(unlabeled_scores.size());
  double u_sum = 0.0;
  for (std::size_t j = 0; j < unlabeled_scores.size(); ++j) {
    const double f = unlabeled_scores[j];
    for (std::size_t i = 0; i < m; ++i) a[i] = theta[i] - f;
    if (grad == nullptr) {
      u_sum += task_surrogate_value(spec.psi, a, k);
      continue;
    }
    u_sum += task_surrogate_value_grad(spec.psi, a, k, g);
    double sum_g = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sum_g += g[i];
      theta_u[i] += gamma * w_u * g[i];
    }
    // Raw (unflagged) d/df; the bracket factor is applied below.
    grad->unlabeled[j] = -gamma * w_u * sum_g;
  }
  r.u = u_sum * w_u;

  const double bracket = r.u - r.l2;
  const bool clamped = spec.non_negative && bracket < 0.0;
  const double bracket_value = clamped ? 0.0 : bracket;
  r.total = gamma * (r.l1 + bracket_value) + (1.0 - gamma) * r.sv;

  if (grad != nullptr) {
    double flag = 1.0;
    if (clamped) flag = rule == BracketRule::kExact ? 0.0 : -1.0;
    for (std::size_t j = 0; j < n_l; ++j) grad->labeled[j] += flag * s2[j];
    for (double& d : grad->unlabeled) d *= flag;
    for (std::size_t i = 0; i < m; ++i) {
      grad->theta[i] += flag * (theta_u[i] - theta_l2[i]);
    }
  }
  return r;
}

namespace {

struct Scored {
  std::vector<double> labeled;
  std::vector<Label> labels;
  std::vector<double> unlabeled;
};

Scored score_dataset(const OrdinalModel& model, const OrdinalDataset& dataset,
                     bool with_unlabeled) {
  Scored s;
  s.labeled.reserve(dataset.num_labeled());
  s.labels.reserve(dataset.num_labeled());
  for (const auto& row : dataset.labeled()) {
    s.labeled.push_back(model.score.score(row.x));
    s.labels.push_back(row.y);
  }
  if (with_unlabeled) {
    s.unlabeled.reserve(dataset.num_unlabeled());
    for (const auto& x : dataset.unlabeled()) s.unlabeled.push_back(model.score.score(x));
  }
  return s;
}

void check_model_fits(const OrdinalModel& model, const OrdinalDataset& dataset) {
  if (model.num_classes() != dataset.num_classes()) {
    throw std::invalid_argument("model has " + std::to_string(model.num_classes()) +
                                " classes, dataset has " +
                                std::to_string(dataset.num_classes()));
  }
  if (model.score.input_dim() != dataset.dim()) {
    throw std::invalid_argument("model input dimension " +
                                std::to_string(model.score.input_dim()) +
                                " does not match dataset dimension " +
                                std::to_string(dataset.dim()));
  }
}

}  // namespace

RiskBreakdown semi_risk(const OrdinalModel& model, const OrdinalDataset& dataset,
                        const RiskSpec& spec) {
  check_model_fits(model, dataset);
  const auto s = score_dataset(model, dataset, spec.gamma > 0.0);
  return semi_risk_from_scores(s.labeled, s.labels, s.unlabeled, model.theta, spec);
}

RiskBreakdown lu_risk(const OrdinalModel& model, const OrdinalDataset& dataset,
                      const RiskSpec& spec) {
  RiskSpec lu = spec;
  lu.gamma = 1.0;
  return semi_risk(model, dataset, lu);
}

double threshold_penalty(std::span<const double> theta, double mu) {
  // mu == 0 switches the order constraint off entirely, unordered thresholds included.
  if (theta.size() < 2 || mu == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    const double gap = theta[i + 1] - theta[i];
    if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
    sum -= std::log(gap);
  }
  return mu * std::max(0.0, sum);
}

std::vector<double> threshold_penalty_grad(std::span<const double> theta, double mu) {
  std::vector<double> grad(theta.size(), 0.0);
  if (theta.size() < 2 || mu == 0.0) return grad;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    const double gap = theta[i + 1] - theta[i];
    if (!(gap > 0.0)) {
      throw std::domain_error("threshold penalty is infinite: theta_" + std::to_string(i + 2) +
                              " <= theta_" + std::to_string(i + 1));
    }
    sum -= std::log(gap);
  }
  if (!(sum > 0.0)) return grad;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    const double inv_gap = 1.0 / (theta[i + 1] - theta[i]);
    grad[i] += mu * inv_gap;
    grad[i + 1] -= mu * inv_gap;
  }
  return grad;
}

ClassSelector parse_class_selector(std::string_view text) {
  if (text == "smallest") return {RemovalStrategy::kSmallest, 1};
  if (text == "bound") return {RemovalStrategy::kBound, 1};
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto digits = text.substr(prefix.size());
    int k = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (res.ec == std::errc() && res.ptr == digits.data() + digits.size()) {
      return {RemovalStrategy::kFixed, k};
    }
  }
  throw std::invalid_argument("unknown class-removal strategy '" + std::string(text) +
                              "' (expected smallest, bound or fixed:K)");
}

std::string to_string(const ClassSelector& selector) {
  switch (selector.strategy) {
    case RemovalStrategy::kSmallest: return "smallest";
    case RemovalStrategy::kBound: return "bound";
    case RemovalStrategy::kFixed: return "fixed:" + std::to_string(selector.fixed_class);
  }
  return "?";
}

Label select_removed_class(std::span<const std::size_t> counts, const ClassSelector& selector) {
  if (counts.size() < 2) throw std::invalid_argument("class counts need K >= 2 entries");
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0) {
    throw std::invalid_argument("class counts sum to zero");
  }
  switch (selector.strategy) {
    case RemovalStrategy::kSmallest:
      return static_cast<Label>(std::min_element(counts.begin(), counts.end()) - counts.begin()) + 1;
    case RemovalStrategy::kBound:
      return static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1;
    case RemovalStrategy::kFixed:
      if (selector.fixed_class < 1 || selector.fixed_class > static_cast<int>(counts.size())) {
        throw std::invalid_argument("fixed removed class " + std::to_string(selector.fixed_class) +
                                    " outside 1.." + std::to_string(counts.size()));
      }
      return selector.fixed_class;
  }
  return 1;
}

BasisCache::BasisCache(const ScoreModel& structure, std::span<const LabeledSample> labeled,
                       std::span<const FeatureVector> unlabeled)
    : width_(structure.num_weights()), num_unlabeled_(unlabeled.size()) {
  labels_.reserve(labeled.size());
  labeled_phi_.resize(labeled.size() * width_);
  for (std::size_t j = 0; j < labeled.size(); ++j) {
    structure.basis(labeled[j].x, std::span<double>(labeled_phi_).subspan(j * width_, width_));
    labels_.push_back(labeled[j].y);
  }
  unlabeled_phi_.resize(unlabeled.size() * width_);
  for (std::size_t j = 0; j < unlabeled.size(); ++j) {
    structure.basis(unlabeled[j], std::span<double>(unlabeled_phi_).subspan(j * width_, width_));
  }
}

namespace {

void mat_vec(const std::vector<double>& rows, std::size_t width, std::span<const double> w,
             std::span<double> out) {
  const double* p = rows.data();
  for (std::size_t j = 0; j < out.size(); ++j, p += width) {
    double s = 0.0;
    for (std::size_t i = 0; i < width; ++i) s += p[i] * w[i];
    out[j] = s;
  }
}

void mat_t_vec_add(const std::vector<double>& rows, std::size_t width,
                   std::span<const double> d, std::span<double> out) {
  const double* p = rows.data();
  for (std::size_t j = 0; j < d.size(); ++j, p += width) {
    const double dj = d[j];
    if (dj == 0.0) continue;
    for (std::size_t i = 0; i < width; ++i) out[i] += dj * p[i];
  }
}

}  // namespace

void BasisCache::labeled_scores(std::span<const double> weights, std::span<double> out) const {
  mat_vec(labeled_phi_, width_, weights, out.first(labels_.size()));
}

void BasisCache::unlabeled_scores(std::span<const double> weights, std::span<double> out) const {
  mat_vec(unlabeled_phi_, width_, weights, out.first(num_unlabeled_));
}

void BasisCache::accumulate(std::span<const double> d_labeled,
                            std::span<const double> d_unlabeled,
                            std::span<double> grad_w) const {
  mat_t_vec_add(labeled_phi_, width_, d_labeled, grad_w);
  mat_t_vec_add(unlabeled_phi_, width_, d_unlabeled, grad_w);
}

ObjectiveValue evaluate_objective(const BasisCache& cache, const OrdinalModel& model,
                                  const RiskSpec& spec, ModelGradient* grad, BracketRule rule) {
  if (cache.width() != model.score.num_weights()) {
    throw std::invalid_argument("basis cache does not match the model structure");
  }
  const bool use_lu = spec.gamma > 0.0;
  std::vector<double> ls(cache.num_labeled());
  std::vector<double> us(use_lu ? cache.num_unlabeled() : 0);
  cache.labeled_scores(model.score.weights(), ls);
  if (use_lu) cache.unlabeled_scores(model.score.weights(), us);

  ObjectiveValue out;
  out.penalty = threshold_penalty(model.theta, spec.mu);
  if (grad == nullptr) {
    out.risk = semi_risk_from_scores(ls, cache.labels(), us, model.theta, spec);
    return out;
  }
  ScoreGradients sg;
  out.risk = semi_risk_from_scores(ls, cache.labels(), us, model.theta, spec, &sg, rule);
  grad->weights.assign(cache.width(), 0.0);
  cache.accumulate(sg.labeled, sg.unlabeled, grad->weights);
  grad->theta = std::move(sg.theta);
  const auto pg = threshold_penalty_grad(model.theta, spec.mu);
  for (std::size_t i = 0; i < pg.size(); ++i) grad->theta[i] += pg[i];
  return out;
}

namespace {

ModelGradient gradient_with_rule(const OrdinalModel& model, const OrdinalDataset& dataset,
                                 const RiskSpec& spec, BracketRule rule) {
  check_model_fits(model, dataset);
  const std::span<const FeatureVector> unlabeled =
      spec.gamma > 0.0 ? std::span<const FeatureVector>(dataset.unlabeled())
                       : std::span<const FeatureVector>();
  const BasisCache cache(model.score, dataset.labeled(), unlabeled);
  ModelGradient grad;
  evaluate_objective(cache, model, spec, &grad, rule);
  return grad;
}

}  // namespace

ModelGradient risk_grad(const OrdinalModel& model, const OrdinalDataset& dataset,
                        const RiskSpec& spec) {
  return gradient_with_rule(model, dataset, spec, BracketRule::kExact);
}

ModelGradient training_direction(const OrdinalModel& model, const OrdinalDataset& dataset,
                                 const RiskSpec& spec) {
  return gradient_with_rule(model, dataset, spec, BracketRule::kSignFlip);
}

double variance_ratio(const OrdinalDataset& dataset, const RiskSpec& spec,
                      const OrdinalModel& model, std::size_t resamples, ResampleSizes sizes,
                      std::uint64_t seed) {
  check_model_fits(model, dataset);
  spec.validate(dataset.num_classes());
  if (resamples < 2) throw std::invalid_argument("variance_ratio needs at least 2 resamples");
  if (sizes.labeled == 0 || sizes.unlabeled == 0) {
    throw std::invalid_argument("variance_ratio needs positive resample sizes");
  }
  if (dataset.num_labeled() == 0 || dataset.num_unlabeled() == 0) {
    throw std::invalid_argument("variance_ratio needs labeled and unlabeled pools");
  }

  const auto pool = score_dataset(model, dataset, true);
  const Label k = spec.removed_class;
  for (int y = 1; y <= dataset.num_classes(); ++y) {
    if (y != k && dataset.class_counts()[static_cast<std::size_t>(y - 1)] == 0) {
      throw std::invalid_argument("variance_ratio: labeled pool lacks class " +
                                  std::to_string(y));
    }
  }

  RiskSpec lu = spec;
  lu.gamma = 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_l(0, pool.labeled.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_u(0, pool.unlabeled.size() - 1);

  std::vector<double> ls(sizes.labeled), us(sizes.unlabeled);
  std::vector<Label> ys(sizes.labeled);
  std::vector<double> lu_values, sv_values;
  lu_values.reserve(resamples);
  sv_values.reserve(resamples);
  const int classes = dataset.num_classes();
  constexpr int kMaxRedraws = 1000;

  for (std::size_t r = 0; r < resamples; ++r) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxRedraws) {
        throw std::runtime_error("variance_ratio: could not draw a labeled sample covering "
                                 "every class other than the removed one");
      }
      std::vector<bool> seen(static_cast<std::size_t>(classes), false);
      for (std::size_t j = 0; j < sizes.labeled; ++j) {
        const std::size_t idx = pick_l(rng);
        ls[j] = pool.labeled[idx];
        ys[j] = pool.labels[idx];
        seen[static_cast<std::size_t>(ys[j] - 1)] = true;
      }
      bool ok = true;
      for (int y = 1; y <= classes; ++y) {
        if (y != k && !seen[static_cast<std::size_t>(y - 1)]) ok = false;
      }
      if (ok) break;
    }
    for (std::size_t j = 0; j < sizes.unlabeled; ++j) us[j] = pool.unlabeled[pick_u(rng)];
    const auto breakdown = semi_risk_from_scores(ls, ys, us, model.theta, lu);
    lu_values.push_back(breakdown.total);
    sv_values.push_back(breakdown.sv);
  }

  auto variance = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
  };
  // Rounding in the mean leaves a tiny positive variance for a constant sample, so
  // degeneracy is judged on the spread of the values instead.
  const auto [lo, hi] = std::minmax_element(sv_values.begin(), sv_values.end());
  const double var_sv = variance(sv_values);
  if (!(*hi - *lo > 1e-12 * std::max(1.0, std::abs(*hi))) || !(var_sv > 0.0)) {
    throw std::domain_error("variance_ratio: supervised risk has zero variance");
  }
  return variance(lu_values) / var_sv;
}

}  // namespace ssor
