#include "ssor/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

namespace ssor {

Method parse_method(std::string_view text, ModelKind default_model) {
  Method m;
  m.model = default_model;
  std::string_view base = text;
  if (const auto dash = text.find('-'); dash != std::string_view::npos) {
    base = text.substr(0, dash);
    m.model = parse_model_kind(text.substr(dash + 1));
  }
  if (base == "sv") {
    m.kind = MethodKind::kSupervised;
  } else if (base == "semi1") {
    m.kind = MethodKind::kSemiSmallest;
  } else if (base == "semi2") {
    m.kind = MethodKind::kSemiBound;
  } else {
    throw std::invalid_argument("unknown method '" + std::string(text) +
                                "' (expected sv, semi1 or semi2, optionally -linear/-kernel)");
  }
  return m;
}

std::string to_string(const Method& method) {
  std::string base;
  switch (method.kind) {
    case MethodKind::kSupervised: base = "sv"; break;
    case MethodKind::kSemiSmallest: base = "semi1"; break;
    case MethodKind::kSemiBound: base = "semi2"; break;
  }
  return base + "-" + std::string(to_string(method.model));
}

TaskLoss default_metric(SurrogateKind surrogate) {
  switch (surrogate) {
    case SurrogateKind::kAllThreshold: return TaskLoss::kAbsolute;
    case SurrogateKind::kImmediateThreshold: return TaskLoss::kZeroOne;
    case SurrogateKind::kLeastSquares: return TaskLoss::kSquared;
    case SurrogateKind::kLeastAbsolute: return TaskLoss::kAbsolute;
  }
  throw std::invalid_argument("unknown surrogate");
}

void ExperimentOptions::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("--gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("--mu must be >= 0");
  if (weight_decays.empty()) throw std::invalid_argument("weight-decay list is empty");
  for (double w : weight_decays) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weight decays must be finite and >= 0");
    }
  }
  train.validate();
}

std::string to_json_line(const TrialResult& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["surrogate"] = r.surrogate;
  j["metric"] = r.metric;
  if (r.ok()) {
    j["value"] = r.value;
  } else {
    j["value"] = nullptr;
  }
  j["seed"] = r.seed;
  j["trial"] = r.trial;
  j["removed_class"] = r.removed_class;
  j["bandwidth"] = r.bandwidth;
  j["weight_decay"] = r.weight_decay;
  j["epochs"] = r.epochs;
  if (!r.ok()) j["error"] = r.error;
  return j.dump();
}

TrialResult trial_from_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  TrialResult r;
  r.dataset = j.at("dataset").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.surrogate = j.at("surrogate").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.value = j.at("value").is_null() ? 0.0 : j.at("value").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.trial = j.value("trial", 0);
  r.removed_class = j.value("removed_class", 0);
  r.bandwidth = j.value("bandwidth", 0.0);
  r.weight_decay = j.value("weight_decay", 0.0);
  r.epochs = j.value("epochs", 0);
  r.error = j.value("error", std::string());
  return r;
}

RiskSpec risk_spec_for(const Method& method, const OrdinalDataset& train,
                       const ExperimentOptions& options) {
  ClassSelector selector;
  double gamma = options.gamma;
  switch (method.kind) {
    case MethodKind::kSupervised:
      gamma = 0.0;
      selector = {RemovalStrategy::kFixed, 1};
      break;
    case MethodKind::kSemiSmallest:
      selector = options.strategy.value_or(ClassSelector{RemovalStrategy::kSmallest, 1});
      break;
    case MethodKind::kSemiBound:
      selector = options.strategy.value_or(ClassSelector{RemovalStrategy::kBound, 1});
      break;
  }
  const auto counts = train.class_counts();
  return RiskSpec{options.psi,
                  select_removed_class(counts, selector),
                  gamma,
                  options.mu,
                  options.non_negative,
                  estimate_priors(train)};
}

RunOutcome run_on_split(const Splits& splits, const std::string& dataset_name,
                        const Method& method, const ExperimentOptions& options,
                        std::uint64_t seed, std::ostream* log) {
  options.validate();
  const OrdinalDataset& train = splits.train;
  RiskSpec spec = risk_spec_for(method, train, options);

  HyperGrid grid;
  grid.weight_decays = options.weight_decays;
  if (method.model == ModelKind::kKernel) {
    std::vector<FeatureVector> inputs;
    for (const auto& s : train.labeled()) inputs.push_back(s.x);
    grid.bandwidths = median_bandwidth_candidates(inputs);
  }
  TrainConfig config = options.train;
  config.seed = seed;
  Selection selection = select_hyperparams(train, spec, config, grid, log);

  const TaskLoss metric = options.metric.value_or(default_metric(options.psi.kind));
  TrialResult r;
  r.dataset = dataset_name;
  r.method = to_string(method);
  r.surrogate = std::string(to_string(options.psi.kind));
  r.metric = std::string(metric_name(metric));
  r.value = evaluate_metric(selection.report.model, splits.test, metric);
  r.seed = seed;
  r.removed_class = spec.removed_class;
  r.bandwidth = selection.bandwidth;
  r.weight_decay = selection.weight_decay;
  r.epochs = selection.report.stopped_epoch;
  return RunOutcome{std::move(r), std::move(selection), std::move(spec)};
}

std::vector<SummaryRow> run_bench(const RawTable& table, const std::string& dataset_name,
                                  const BenchOptions& options, std::ostream& jsonl) {
  if (options.trials < 1) throw std::invalid_argument("--trials must be >= 1");
  if (options.methods.empty()) throw std::invalid_argument("no methods requested");
  options.experiment.validate();
  const TaskLoss metric =
      options.experiment.metric.value_or(default_metric(options.experiment.psi.kind));

  std::vector<TrialResult> results;
  for (int t = 1; t <= options.trials; ++t) {
    const std::uint64_t trial_seed = options.seed + static_cast<std::uint64_t>(t);
    SplitSpec split = options.split;
    split.seed = trial_seed;
    std::optional<Splits> splits;
    std::string split_error;
    try {
      splits.emplace(make_splits(table, split));
    } catch (const std::exception& e) {
      split_error = e.what();
    }
    for (const Method& method : options.methods) {
      TrialResult r;
      if (splits) {
        try {
          r = run_on_split(*splits, dataset_name, method, options.experiment, trial_seed)
                  .result;
        } catch (const std::exception& e) {
          r.error = e.what();
        }
      } else {
        r.error = split_error;
      }
      if (!r.ok()) {
        r.dataset = dataset_name;
        r.method = to_string(method);
        r.surrogate = std::string(to_string(options.experiment.psi.kind));
        r.metric = std::string(metric_name(metric));
        r.seed = trial_seed;
      }
      r.trial = t;
      jsonl << to_json_line(r) << '\n';
      jsonl.flush();
      results.push_back(std::move(r));
    }
  }
  return summarize(results);
}

namespace {

struct GroupStats {
  std::vector<double> values;
  int failed = 0;
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

std::string model_suffix(const std::string& method) {
  const auto dash = method.find('-');
  return dash == std::string::npos ? std::string() : method.substr(dash);
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, GroupStats> groups;
  for (const auto& r : results) {
    Key key{r.dataset, r.method, r.surrogate, r.metric};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    if (r.ok()) {
      it->second.values.push_back(r.value);
    } else {
      ++it->second.failed;
    }
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& g = groups.at(key);
    SummaryRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                   0.0, 0.0, static_cast<int>(g.values.size()), g.failed, std::nullopt};
    if (!g.values.empty()) {
      row.mean = mean_of(g.values);
      row.std_error = std::sqrt(sample_variance(g.values) / static_cast<double>(g.values.size()));
    } else {
      row.mean = std::nan("");
    }
    rows.push_back(std::move(row));
  }

  for (auto& row : rows) {
    if (row.method.rfind("sv", 0) == 0 || row.n_trials < 2) continue;
    const Key sv_key{row.dataset, "sv" + model_suffix(row.method), row.surrogate, row.metric};
    const auto it = groups.find(sv_key);
    if (it == groups.end() || it->second.values.size() < 2) continue;
    const auto& sv = it->second.values;
    const auto& mine = groups.at(Key{row.dataset, row.method, row.surrogate, row.metric}).values;
    const double se2 = sample_variance(sv) / static_cast<double>(sv.size()) +
                       sample_variance(mine) / static_cast<double>(mine.size());
    if (se2 > 0.0) row.t_stat_vs_sv = (mean_of(sv) - mean_of(mine)) / std::sqrt(se2);
  }
  return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "dataset,method,surrogate,metric,mean,stderr,n_trials,t_stat_vs_sv,n_failed\n";
  auto real = [](double v) {
    nlohmann::json j = v;
    return std::isfinite(v) ? j.dump() : std::string("nan");
  };
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.method << ',' << r.surrogate << ',' << r.metric << ','
        << real(r.mean) << ',' << real(r.std_error) << ',' << r.n_trials << ',';
    if (r.t_stat_vs_sv) out << real(*r.t_stat_vs_sv);
    out << ',' << r.n_failed << '\n';
  }
}

std::vector<VarianceRow> variance_table(const RawTable& table, const std::string& dataset_name,
                                        const VarianceOptions& options) {
  const LabelSpace labels(options.num_classes);
  std::vector<FeatureVector> inputs;
  std::vector<LabeledSample> labeled;
  inputs.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    if (r.raw_label < 1 || r.raw_label > options.num_classes) {
      throw std::invalid_argument("label " + std::to_string(r.raw_label) + " outside 1.." +
                                  std::to_string(options.num_classes));
    }
    inputs.push_back(r.features);
  }
  if (options.standardize && !inputs.empty()) {
    const std::size_t d = table.dim;
    const double n = static_cast<double>(inputs.size());
    for (std::size_t c = 0; c < d; ++c) {
      double mean = 0.0;
      for (const auto& x : inputs) mean += x[c];
      mean /= n;
      double var = 0.0;
      for (const auto& x : inputs) var += (x[c] - mean) * (x[c] - mean);
      const double sd = std::sqrt(var / n);
      const double scale = sd > 0.0 ? sd : 1.0;
      for (auto& x : inputs) x[c] = (x[c] - mean) / scale;
    }
  }
  labeled.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    labeled.push_back({inputs[i], static_cast<Label>(table.rows[i].raw_label)});
  }
  const OrdinalDataset pool(labels, table.dim, std::move(labeled), std::move(inputs));

  OrdinalModel model = init_model(ScoreModel::linear(table.dim), options.num_classes);
  // LeCun-normal initialization of a linear layer: w ~ N(0, 1/d), zero bias.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(table.dim)));
  auto weights = model.score.weights();
  for (std::size_t i = 0; i < table.dim; ++i) weights[i] = normal(rng);

  const auto counts = pool.class_counts();
  const Label k = select_removed_class(counts, ClassSelector{RemovalStrategy::kBound, 1});
  std::vector<VarianceRow> rows;
  for (SurrogateKind kind : options.surrogates) {
    const RiskSpec spec{TaskSurrogate{kind, options.binary}, k, 1.0, 0.0, false,
                        estimate_priors(pool)};
    const double ratio =
        variance_ratio(pool, spec, model, options.resamples, options.sizes, options.seed);
    rows.push_back({std::string(to_string(kind)), dataset_name, ratio});
  }
  return rows;
}

}  // namespace ssor
