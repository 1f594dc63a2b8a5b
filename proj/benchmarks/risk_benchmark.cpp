#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ssor/data.hpp"
#include "ssor/risk.hpp"
#include "ssor/train.hpp"

namespace {

struct Problem {
  ssor::OrdinalDataset dataset;
  ssor::OrdinalModel model;
  ssor::RiskSpec spec;
};

Problem make_problem(std::size_t n_unlabeled, ssor::ModelKind kind) {
  ssor::SyntheticSpec s;
  s.rows = 30 + 2 * n_unlabeled;
  s.seed = 11;
  const auto splits = ssor::make_splits(ssor::make_synthetic(s), ssor::SplitSpec{30, 3, 0.5, 11});
  const auto& train = splits.train;
  std::vector<ssor::FeatureVector> centers;
  for (const auto& l : train.labeled()) centers.push_back(l.x);
  auto score = kind == ssor::ModelKind::kLinear ? ssor::ScoreModel::linear(train.dim())
                                                : ssor::ScoreModel::kernel(centers, 1.0);
  auto model = ssor::init_model(std::move(score), 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (double& w : model.score.weights()) w = normal(rng);
  ssor::RiskSpec spec{{ssor::SurrogateKind::kAllThreshold, ssor::BinaryLoss::kLogistic},
                      3, 0.8, 10.0, true, ssor::estimate_priors(train)};
  return {train, std::move(model), std::move(spec)};
}

void BM_ObjectiveAndGradient(benchmark::State& state) {
  const auto kind = state.range(1) == 0 ? ssor::ModelKind::kLinear : ssor::ModelKind::kKernel;
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), kind);
  const ssor::BasisCache cache(p.model.score, p.dataset.labeled(), p.dataset.unlabeled());
  ssor::ModelGradient grad;
  for (auto _ : state) {
    auto v = ssor::evaluate_objective(cache, p.model, p.spec, &grad,
                                      ssor::BracketRule::kSignFlip);
    benchmark::DoNotOptimize(v);
    benchmark::DoNotOptimize(grad.weights.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(p.dataset.num_unlabeled() + 30));
}
BENCHMARK(BM_ObjectiveAndGradient)
    ->ArgsProduct({{100, 1000, 10000}, {0, 1}})
    ->ArgNames({"n_unlabeled", "kernel"});

void BM_SemiRiskUncached(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), ssor::ModelKind::kLinear);
  for (auto _ : state) {
    auto r = ssor::semi_risk(p.model, p.dataset, p.spec);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SemiRiskUncached)->Arg(1000)->ArgName("n_unlabeled");

void BM_FitLinear(benchmark::State& state) {
  const auto p = make_problem(1000, ssor::ModelKind::kLinear);
  ssor::TrainConfig config;
  config.max_epochs = static_cast<int>(state.range(0));
  config.patience = config.max_epochs + 1;
  const auto start = ssor::init_model(ssor::ScoreModel::linear(p.dataset.dim()), 3);
  for (auto _ : state) {
    auto r = ssor::fit(p.dataset, p.dataset, p.spec, config, start);
    benchmark::DoNotOptimize(r.best_val);
  }
}
BENCHMARK(BM_FitLinear)->Arg(100)->ArgName("epochs")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
