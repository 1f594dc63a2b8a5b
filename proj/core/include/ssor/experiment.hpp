#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssor/data.hpp"
#include "ssor/losses.hpp"
#include "ssor/metrics.hpp"
#include "ssor/risk.hpp"
#include "ssor/score_model.hpp"
#include "ssor/train.hpp"

namespace ssor {

/// sv: supervised only (gamma = 0). semi1 / semi2: semi-supervised with the removed
/// class chosen by the smallest-count / bound strategy.
enum class MethodKind { kSupervised, kSemiSmallest, kSemiBound };

struct Method {
  MethodKind kind = MethodKind::kSemiBound;
  ModelKind model = ModelKind::kLinear;

  friend bool operator==(const Method&, const Method&) = default;
};

/// "sv", "semi1", "semi2", optionally suffixed with "-linear" or "-kernel"; without a
/// suffix `default_model` is used.
Method parse_method(std::string_view text, ModelKind default_model = ModelKind::kLinear);
std::string to_string(const Method& method);

/// The metric that matches a surrogate: at -> MAE, it -> MZE, ls -> MSE, lad -> MAE.
TaskLoss default_metric(SurrogateKind surrogate);

struct ExperimentOptions {
  TaskSurrogate psi{SurrogateKind::kAllThreshold, BinaryLoss::kLogistic};
  double gamma = 0.8;
  double mu = 10.0;
  bool non_negative = true;
  /// Overrides the strategy implied by the method (semi methods only).
  std::optional<ClassSelector> strategy;
  /// Overrides the metric paired with the surrogate.
  std::optional<TaskLoss> metric;
  TrainConfig train;
  std::vector<double> weight_decays = {0.1, 0.01, 0.001};

  void validate() const;
};

struct TrialResult {
  std::string dataset;
  std::string method;
  std::string surrogate;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
  int trial = 0;
  Label removed_class = 0;
  double bandwidth = 0.0;
  double weight_decay = 0.0;
  int epochs = 0;
  /// Non-empty when the run failed; `value` is then meaningless.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

std::string to_json_line(const TrialResult& result);
TrialResult trial_from_json(std::string_view line);

struct RunOutcome {
  TrialResult result;
  Selection selection;
  RiskSpec spec;
};

/// Selects hyperparameters, fits on `splits.train` and scores the test part.
RunOutcome run_on_split(const Splits& splits, const std::string& dataset_name,
                        const Method& method, const ExperimentOptions& options,
                        std::uint64_t seed, std::ostream* log = nullptr);

/// The risk configuration a method trains with on the given training data.
RiskSpec risk_spec_for(const Method& method, const OrdinalDataset& train,
                       const ExperimentOptions& options);

struct BenchOptions {
  SplitSpec split;
  int trials = 20;
  std::vector<Method> methods;
  ExperimentOptions experiment;
  std::uint64_t seed = 0;
};

struct SummaryRow {
  std::string dataset;
  std::string method;
  std::string surrogate;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
  int n_trials = 0;
  int n_failed = 0;
  /// Welch t statistic of (sv mean - this mean) against the sv method with the same model
  /// family; absent for sv itself or when undefined.
  std::optional<double> t_stat_vs_sv;
};

/// Trial t = 1..trials re-splits the table with seed + t and runs every method on that
/// split. One JSON line per (trial, method) is written to `jsonl` as it completes.
std::vector<SummaryRow> run_bench(const RawTable& table, const std::string& dataset_name,
                                  const BenchOptions& options, std::ostream& jsonl);

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results);

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

struct VarianceRow {
  std::string surrogate;
  std::string dataset;
  double ratio = 0.0;
};

struct VarianceOptions {
  std::vector<SurrogateKind> surrogates = {SurrogateKind::kAllThreshold,
                                           SurrogateKind::kImmediateThreshold,
                                           SurrogateKind::kLeastSquares};
  BinaryLoss binary = BinaryLoss::kLogistic;
  int num_classes = 3;
  std::size_t resamples = 1000;
  ResampleSizes sizes;
  bool standardize = true;
  std::uint64_t seed = 0;
};

/// Variance ratio of the LU estimator (without the non-negative correction) against the
/// supervised one, at a randomly initialized linear model (weights N(0, 1/d), zero bias,
/// evenly spaced thresholds).
/// The whole table serves as both pools; priors are its class frequencies and the removed
/// class is the most frequent one.
std::vector<VarianceRow> variance_table(const RawTable& table, const std::string& dataset_name,
                                        const VarianceOptions& options);

}  // namespace ssor
