// ssor: train, evaluate and benchmark semi-supervised ordinal regressors from CSV data.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssor/data.hpp"
#include "ssor/experiment.hpp"
#include "ssor/ordinal_model.hpp"

namespace {

struct SharedFlags {
  std::string data;
  bool has_header = false;
  int k_classes = 3;
  std::size_t n_labeled = 30;
  double unlabeled_fraction = 0.5;
  std::string surrogate = "at";
  std::string binary_loss = "logistic";
  std::string model = "linear";
  std::string method = "semi2";
  double gamma = 0.8;
  double mu = 10.0;
  std::string strategy;
  bool non_negative = true;
  double lr = 0.01;
  int patience = 20;
  int max_epochs = 2000;
  std::vector<double> weight_decays = {0.1, 0.01, 0.001};
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::string metric;
};

void add_shared_flags(CLI::App& app, SharedFlags& f) {
  app.add_option("--data", f.data, "CSV file: features..., integer label")->required();
  app.add_flag("--has-header", f.has_header, "Skip the first non-empty line");
  app.add_option("--k-classes", f.k_classes, "Number of ordinal classes after merging")
      ->check(CLI::Range(2, 1000));
  app.add_option("--n-labeled", f.n_labeled, "Labeled training rows");
  app.add_option("--unlabeled-fraction", f.unlabeled_fraction,
                 "Share of the remaining rows used as unlabeled data")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--surrogate", f.surrogate, "Task surrogate")
      ->check(CLI::IsMember({"at", "it", "ls", "lad"}));
  app.add_option("--binary-loss", f.binary_loss, "Binary loss inside at/it")
      ->check(CLI::IsMember({"logistic", "squared", "double-hinge", "hinge", "exponential"}));
  app.add_option("--model", f.model, "Score model family")
      ->check(CLI::IsMember({"linear", "kernel"}));
  app.add_option("--method", f.method, "sv|semi1|semi2, optionally -linear/-kernel");
  app.add_option("--gamma", f.gamma, "Weight of the LU estimator")->check(CLI::Range(0.0, 1.0));
  app.add_option("--mu", f.mu, "Weight of the threshold-order penalty")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--strategy", f.strategy, "smallest|bound|fixed:K (overrides the method)");
  app.add_flag("--non-negative,!--no-non-negative", f.non_negative,
               "Clamp the class-k term of the LU estimator at 0");
  app.add_option("--lr", f.lr, "Gradient-descent step size")->check(CLI::NonNegativeNumber);
  app.add_option("--patience", f.patience, "Early-stopping patience in epochs")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-epochs", f.max_epochs, "Epoch limit")->check(CLI::PositiveNumber);
  app.add_option("--weight-decays", f.weight_decays, "Comma-separated weight-decay grid")
      ->delimiter(',');
  app.add_option("--trials", f.trials, "Benchmark trials")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--out", f.out, "Output path");
  app.add_option("--metric", f.metric, "Override the metric paired with the surrogate")
      ->check(CLI::IsMember({"MAE", "MZE", "MSE"}));
}

std::string dataset_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

ssor::RawTable load_table(const SharedFlags& f) {
  return ssor::merge_classes(ssor::load_csv(f.data, f.has_header), f.k_classes);
}

ssor::SplitSpec split_spec(const SharedFlags& f) {
  ssor::SplitSpec s;
  s.n_labeled = f.n_labeled;
  s.num_classes = f.k_classes;
  s.unlabeled_fraction = f.unlabeled_fraction;
  s.seed = f.seed;
  return s;
}

ssor::ExperimentOptions experiment_options(const SharedFlags& f) {
  ssor::ExperimentOptions o;
  o.psi = {ssor::parse_surrogate(f.surrogate), ssor::parse_binary_loss(f.binary_loss)};
  o.gamma = f.gamma;
  o.mu = f.mu;
  o.non_negative = f.non_negative;
  if (!f.strategy.empty()) o.strategy = ssor::parse_class_selector(f.strategy);
  if (!f.metric.empty()) o.metric = ssor::parse_metric(f.metric);
  o.train.learning_rate = f.lr;
  o.train.patience = f.patience;
  o.train.max_epochs = f.max_epochs;
  o.weight_decays = f.weight_decays;
  o.validate();
  return o;
}

ssor::Method method_of(const SharedFlags& f) {
  return ssor::parse_method(f.method, ssor::parse_model_kind(f.model));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

nlohmann::ordered_json run_json(const ssor::TrialResult& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["surrogate"] = r.surrogate;
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["seed"] = r.seed;
  return j;
}

int cmd_train(const SharedFlags& f, const std::string& log_path) {
  const auto options = experiment_options(f);
  const auto method = method_of(f);
  const auto table = load_table(f);
  const auto splits = ssor::make_splits(table, split_spec(f));
  print_warnings(splits.warnings);

  std::optional<std::ofstream> log;
  if (!log_path.empty()) {
    log.emplace(open_output(log_path));
    *log << "epoch,objective,val_risk\n";
  }
  const auto outcome = ssor::run_on_split(splits, dataset_name(f.data), method, options, f.seed,
                                          log ? &*log : nullptr);
  print_warnings(outcome.selection.report.warnings);
  if (!f.out.empty()) ssor::save_model_file(outcome.selection.report.model, f.out);

  auto j = run_json(outcome.result);
  j["removed_class"] = outcome.result.removed_class;
  j["bandwidth"] = outcome.result.bandwidth;
  j["weight_decay"] = outcome.result.weight_decay;
  j["epochs"] = outcome.result.epochs;
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_eval(const SharedFlags& f, const std::string& model_path) {
  const auto options = experiment_options(f);
  const auto model = ssor::load_model_file(model_path);
  const auto table = load_table(f);
  const auto splits = ssor::make_splits(table, split_spec(f));
  print_warnings(splits.warnings);
  if (model.num_classes() != f.k_classes || model.score.input_dim() != table.dim) {
    throw std::runtime_error(model_path + ": model does not match the data (K or dimension)");
  }
  const auto metric = options.metric.value_or(ssor::default_metric(options.psi.kind));

  ssor::TrialResult r;
  r.dataset = dataset_name(f.data);
  r.method = ssor::to_string(method_of(f));
  r.surrogate = std::string(ssor::to_string(options.psi.kind));
  r.metric = std::string(ssor::metric_name(metric));
  r.value = ssor::evaluate_metric(model, splits.test, metric);
  r.seed = f.seed;
  std::cout << run_json(r).dump() << '\n';
  return 0;
}

int cmd_variance(const SharedFlags& f, const std::vector<std::string>& surrogates,
                 std::size_t resamples, std::size_t n_unlabeled) {
  const auto table = load_table(f);
  ssor::VarianceOptions o;
  o.surrogates.clear();
  for (const auto& s : surrogates) o.surrogates.push_back(ssor::parse_surrogate(s));
  o.binary = ssor::parse_binary_loss(f.binary_loss);
  o.num_classes = f.k_classes;
  o.resamples = resamples;
  o.sizes = {f.n_labeled, n_unlabeled};
  o.seed = f.seed;
  const auto rows = ssor::variance_table(table, dataset_name(f.data), o);

  std::optional<std::ofstream> file;
  if (!f.out.empty()) file.emplace(open_output(f.out));
  std::ostream& out = file ? *file : std::cout;
  out << "surrogate,dataset,ratio\n";
  for (const auto& r : rows) {
    out << r.surrogate << ',' << r.dataset << ',' << nlohmann::json(r.ratio).dump() << '\n';
  }
  return 0;
}

int cmd_bench(const SharedFlags& f, const std::vector<std::string>& methods,
              const std::string& summary_path) {
  ssor::BenchOptions o;
  o.experiment = experiment_options(f);
  o.split = split_spec(f);
  o.trials = f.trials;
  o.seed = f.seed;
  const auto default_model = ssor::parse_model_kind(f.model);
  for (const auto& m : methods) o.methods.push_back(ssor::parse_method(m, default_model));
  const auto table = load_table(f);

  std::optional<std::ofstream> jsonl_file;
  if (!f.out.empty()) jsonl_file.emplace(open_output(f.out));
  std::ostream& jsonl = jsonl_file ? *jsonl_file : std::cout;
  const auto rows = ssor::run_bench(table, dataset_name(f.data), o, jsonl);

  if (!summary_path.empty()) {
    auto summary = open_output(summary_path);
    ssor::write_summary_csv(rows, summary);
  } else if (jsonl_file) {
    ssor::write_summary_csv(rows, std::cout);
  } else {
    ssor::write_summary_csv(rows, std::cerr);
  }
  return 0;
}

int cmd_synth(std::size_t rows, std::size_t dim, int k, double score_noise, double label_noise,
              std::uint64_t seed, const std::string& out_path) {
  ssor::SyntheticSpec s;
  s.rows = rows;
  s.dim = dim;
  s.num_classes = k;
  s.score_noise = score_noise;
  s.label_noise = label_noise;
  s.seed = seed;
  const auto table = ssor::make_synthetic(s);
  if (out_path.empty()) {
    ssor::write_csv(table, std::cout);
  } else {
    auto out = open_output(out_path);
    ssor::write_csv(table, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised ordinal regression by empirical risk minimization"};
  app.require_subcommand(1);

  SharedFlags train_flags;
  std::string log_path;
  auto* train = app.add_subcommand("train", "Select hyperparameters, fit, report the test metric");
  add_shared_flags(*train, train_flags);
  train->add_option("--log", log_path, "CSV of epoch,objective,val_risk for the final fit");

  SharedFlags eval_flags;
  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Score a saved model on the test split");
  add_shared_flags(*eval, eval_flags);
  eval->add_option("--model-file", model_path, "Model written by train --out")->required();

  SharedFlags variance_flags;
  std::vector<std::string> surrogates = {"at", "it", "ls"};
  std::size_t resamples = 1000;
  std::size_t n_unlabeled = 1000;
  auto* variance = app.add_subcommand("variance", "Variance ratio of LU vs supervised risk");
  add_shared_flags(*variance, variance_flags);
  variance->add_option("--surrogates", surrogates, "Comma-separated surrogates")
      ->delimiter(',')
      ->check(CLI::IsMember({"at", "it", "ls", "lad"}));
  variance->add_option("--resamples", resamples, "Bootstrap resamples")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  variance->add_option("--n-unlabeled", n_unlabeled, "Unlabeled points per resample")
      ->check(CLI::PositiveNumber);

  SharedFlags bench_flags;
  std::vector<std::string> methods = {"sv-linear", "semi1-linear", "semi2-linear"};
  std::string summary_path;
  auto* bench = app.add_subcommand("bench", "Multi-trial comparison of methods");
  add_shared_flags(*bench, bench_flags);
  bench->add_option("--methods", methods, "Comma-separated methods")->delimiter(',');
  bench->add_option("--summary", summary_path, "Summary CSV path");

  std::size_t synth_rows = 1000;
  std::size_t synth_dim = 5;
  int synth_k = 3;
  double score_noise = 0.5;
  double label_noise = 0.1;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic ordinal CSV");
  synth->add_option("--rows", synth_rows)->check(CLI::PositiveNumber);
  synth->add_option("--dim", synth_dim)->check(CLI::PositiveNumber);
  synth->add_option("--k-classes", synth_k)->check(CLI::Range(2, 1000));
  synth->add_option("--score-noise", score_noise)->check(CLI::NonNegativeNumber);
  synth->add_option("--label-noise", label_noise)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (*train) return cmd_train(train_flags, log_path);
    if (*eval) return cmd_eval(eval_flags, model_path);
    if (*variance) return cmd_variance(variance_flags, surrogates, resamples, n_unlabeled);
    if (*bench) return cmd_bench(bench_flags, methods, summary_path);
    if (*synth) {
      return cmd_synth(synth_rows, synth_dim, synth_k, score_noise, label_noise, synth_seed,
                       synth_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
