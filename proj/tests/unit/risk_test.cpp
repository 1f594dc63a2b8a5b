#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ssor/risk.hpp"
#include "../support/generators.hpp"
#include "../support/toy_distribution.hpp"

namespace ssor {
namespace {

const TaskSurrogate kAtLogistic{SurrogateKind::kAllThreshold, BinaryLoss::kLogistic};
constexpr std::array kSurrogates = {SurrogateKind::kAllThreshold,
                                    SurrogateKind::kImmediateThreshold,
                                    SurrogateKind::kLeastSquares, SurrogateKind::kLeastAbsolute};

OrdinalDataset dataset_with_counts(std::vector<int> counts, std::size_t n_unlabeled,
                                   std::uint64_t seed = 1) {
  testing::Gen gen(seed);
  std::vector<LabeledSample> labeled;
  for (std::size_t y = 0; y < counts.size(); ++y) {
    for (int j = 0; j < counts[y]; ++j) labeled.push_back({gen.vector(2), static_cast<Label>(y + 1)});
  }
  return OrdinalDataset(LabelSpace(static_cast<int>(counts.size())), 2, std::move(labeled),
                        gen.inputs(n_unlabeled, 2));
}

RiskSpec spec_for(const OrdinalDataset& d, TaskSurrogate psi, Label k, double gamma,
                  bool non_negative, double mu = 10.0) {
  return RiskSpec{psi, k, gamma, mu, non_negative, estimate_priors(d)};
}

TEST(EstimatePriors, Examples) {
  EXPECT_EQ(estimate_priors(dataset_with_counts({10, 10, 10}, 0)).values()[1], 1.0 / 3.0);
  const auto degenerate = estimate_priors(dataset_with_counts({30, 0, 0}, 0));
  EXPECT_EQ(std::vector<double>(degenerate.values().begin(), degenerate.values().end()),
            (std::vector<double>{1.0, 0.0, 0.0}));
  const auto p = estimate_priors(dataset_with_counts({5, 10, 15}, 0));
  EXPECT_DOUBLE_EQ(p[1], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(p[2], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p[3], 0.5);
  EXPECT_THROW(estimate_priors(dataset_with_counts({0, 0, 0}, 3)), std::invalid_argument);
}

TEST(SupervisedRisk, ConstantAlphaGivesTwoLogTwo) {
  const auto d = dataset_with_counts({3, 4, 5}, 0);
  const auto m = init_model(ScoreModel::linear(2), 3);
  auto zero_theta = m;
  zero_theta.theta = {0.0, 0.0};
  EXPECT_NEAR(supervised_risk(zero_theta, d.labeled(), kAtLogistic), 2.0 * std::log(2.0), 1e-15);
}

TEST(SupervisedRisk, ZeroWhenEveryTermIsZero) {
  // LS with alpha_1 = 3/2 - y for every point: f(x) = x and theta_1 = 0 on x = y - 3/2.
  auto s = ScoreModel::linear(1);
  s.set_weights({1.0, 0.0});
  const OrdinalModel m{std::move(s), {0.0, 1.0}};
  const std::vector<LabeledSample> l = {{{-0.5}, 1}, {{0.5}, 2}, {{1.5}, 3}};
  EXPECT_EQ(supervised_risk(m, l, {SurrogateKind::kLeastSquares, BinaryLoss::kLogistic}), 0.0);
}

TEST(SupervisedRisk, EqualsPriorWeightedClassMeans) {
  testing::Gen gen(51);
  const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(40, 2, 3, 2), {});
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  const auto pi = estimate_priors(d);
  const auto counts = d.class_counts();
  double weighted = 0.0;
  for (int y = 1; y <= 3; ++y) {
    double mean = 0.0;
    for (const auto& s : d.labeled()) {
      if (s.y == y) mean += task_surrogate_value(kAtLogistic, alpha(m, s.x), y);
    }
    weighted += pi[y] * mean / static_cast<double>(counts[static_cast<std::size_t>(y - 1)]);
  }
  EXPECT_NEAR(supervised_risk(m, d.labeled(), kAtLogistic), weighted, 1e-14);
  EXPECT_THROW(supervised_risk(m, {}, kAtLogistic), std::invalid_argument);
}

TEST(LuRisk, ConstantLossCancels) {
  // Zero weights and theta = (0, 0) make every AT term 2 log 2, whatever the label.
  const auto d = dataset_with_counts({4, 7, 2}, 9);
  auto m = init_model(ScoreModel::linear(2), 3);
  m.theta = {0.0, 0.0};
  const double c = 2.0 * std::log(2.0);
  for (Label k = 1; k <= 3; ++k) {
    const auto spec = spec_for(d, kAtLogistic, k, 0.8, false);
    const auto r = lu_risk(m, d, spec);
    double others = 0.0;
    for (int y = 1; y <= 3; ++y) if (y != k) others += spec.priors[y];
    EXPECT_NEAR(r.l1, c * others, 1e-14);
    EXPECT_NEAR(r.u, c, 1e-14);
    EXPECT_NEAR(r.l2, c * others, 1e-14);
    EXPECT_NEAR(r.total, c, 1e-14);
  }
}

TEST(LuRisk, BreakdownMatchesDirectSums) {
  testing::Gen gen(52);
  const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(15, 2, 3), gen.inputs(11, 2));
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  const Label k = 2;
  const auto spec = spec_for(d, kAtLogistic, k, 0.3, false);
  const auto counts = d.class_counts();
  double l1 = 0.0, l2 = 0.0, u = 0.0;
  for (const auto& s : d.labeled()) {
    if (s.y == k) continue;
    const double w = spec.priors[s.y] / static_cast<double>(counts[static_cast<std::size_t>(s.y - 1)]);
    l1 += w * task_surrogate_value(kAtLogistic, alpha(m, s.x), s.y);
    l2 += w * task_surrogate_value(kAtLogistic, alpha(m, s.x), k);
  }
  for (const auto& x : d.unlabeled()) u += task_surrogate_value(kAtLogistic, alpha(m, x), k);
  u /= static_cast<double>(d.num_unlabeled());
  const auto r = lu_risk(m, d, spec);
  EXPECT_NEAR(r.l1, l1, 1e-13);
  EXPECT_NEAR(r.l2, l2, 1e-13);
  EXPECT_NEAR(r.u, u, 1e-13);
  EXPECT_NEAR(r.total, l1 + u - l2, 1e-13);
}

TEST(LuRisk, RequiresUnlabeledDataAndNonRemovedClasses) {
  const auto m = init_model(ScoreModel::linear(2), 3);
  const auto no_unlabeled = dataset_with_counts({3, 3, 3}, 0);
  EXPECT_THROW(lu_risk(m, no_unlabeled, spec_for(no_unlabeled, kAtLogistic, 1, 0.8, false)),
               std::invalid_argument);
  const auto missing = dataset_with_counts({3, 0, 3}, 4);
  EXPECT_THROW(lu_risk(m, missing, spec_for(missing, kAtLogistic, 1, 0.8, false)),
               std::invalid_argument);
  // The removed class itself may be empty.
  EXPECT_NO_THROW(lu_risk(m, missing, spec_for(missing, kAtLogistic, 2, 0.8, false)));
}

TEST(LuRisk, ExactRepresentativeSampleEqualsPopulationRisk) {
  // Multiplicities proportional to the joint table make the empirical estimator equal its
  // population value.
  const testing::ToyDistribution toy{{-1.0, 0.5}, {{0.25, 0.125, 0.0}, {0.125, 0.25, 0.25}}};
  const int scale = 8;
  std::vector<LabeledSample> labeled;
  std::vector<FeatureVector> unlabeled;
  for (std::size_t p = 0; p < toy.points.size(); ++p) {
    for (int y = 1; y <= 3; ++y) {
      const int copies = static_cast<int>(std::lround(toy.joint[p][static_cast<std::size_t>(y - 1)] * scale));
      for (int c = 0; c < copies; ++c) {
        labeled.push_back({{toy.points[p]}, y});
        unlabeled.push_back({toy.points[p]});
      }
    }
  }
  const OrdinalDataset d(LabelSpace(3), 1, labeled, unlabeled);
  for (auto kind : kSurrogates) {
    const TaskSurrogate psi{kind, BinaryLoss::kLogistic};
    const auto m = testing::line_model(0.7, -0.2, {-0.4, 0.9});
    for (Label k = 1; k <= 3; ++k) {
      const RiskSpec spec{psi, k, 1.0, 0.0, false, ClassPriors(toy.priors())};
      EXPECT_NEAR(lu_risk(m, d, spec).total, testing::population_risk(toy, m, psi), 1e-12);
    }
  }
}

TEST(LuRisk, PopulationIdentityOnToyDistributions) {
  testing::Gen gen(53);
  for (const auto& toy : testing::toy_distributions()) {
    for (auto kind : kSurrogates) {
      for (auto binary : {BinaryLoss::kLogistic, BinaryLoss::kHinge}) {
        const TaskSurrogate psi{kind, binary};
        const auto m = testing::line_model(gen.normal(), gen.normal(), gen.ordered_theta(3));
        for (Label k = 1; k <= 3; ++k) {
          EXPECT_NEAR(testing::population_lu_risk(toy, m, psi, k),
                      testing::population_risk(toy, m, psi), 1e-12);
        }
      }
    }
  }
}

TEST(LuRisk, UnbiasedOverExhaustiveSmallSamples) {
  // One labeled point per class, two unlabeled points, two-point support.
  const testing::ToyDistribution toy{{-1.0, 1.0}, {{0.25, 0.1, 0.0}, {0.1, 0.25, 0.3}}};
  const ClassPriors priors(toy.priors());
  const auto m = testing::line_model(1.3, 0.1, {-0.5, 0.6});
  for (auto kind : kSurrogates) {
    const TaskSurrogate psi{kind, BinaryLoss::kSquared};
    for (Label k = 1; k <= 3; ++k) {
      const RiskSpec spec{psi, k, 1.0, 0.0, false, priors};
      double mean = 0.0;
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t u1 = 0; u1 < 2; ++u1)
              for (std::size_t u2 = 0; u2 < 2; ++u2) {
                const double p = toy.conditional(a, 1) * toy.conditional(b, 2) *
                                 toy.conditional(c, 3) * toy.marginal(u1) * toy.marginal(u2);
                if (p == 0.0) continue;
                const OrdinalDataset d(LabelSpace(3), 1,
                                       {{{toy.points[a]}, 1}, {{toy.points[b]}, 2}, {{toy.points[c]}, 3}},
                                       {{toy.points[u1]}, {toy.points[u2]}});
                mean += p * lu_risk(m, d, spec).total;
              }
      EXPECT_NEAR(mean, testing::population_risk(toy, m, psi), 1e-12);
    }
  }
}

TEST(SemiRisk, GammaEndpoints) {
  testing::Gen gen(54);
  const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(12, 2, 3), gen.inputs(7, 2));
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  for (bool nn : {false, true}) {
    const auto s0 = semi_risk(m, d, spec_for(d, kAtLogistic, 2, 0.0, nn));
    EXPECT_EQ(s0.total, supervised_risk(m, d.labeled(), kAtLogistic));
    const auto s1 = semi_risk(m, d, spec_for(d, kAtLogistic, 2, 1.0, nn));
    EXPECT_EQ(s1.total, lu_risk(m, d, spec_for(d, kAtLogistic, 2, 0.5, nn)).total);
  }
}

TEST(SemiRisk, SupervisedNeverTouchesUnlabeledData) {
  testing::Gen gen(55);
  const auto labeled = gen.labeled(12, 2, 3);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const OrdinalDataset clean(LabelSpace(3), 2, labeled, {});
  const OrdinalDataset poisoned(LabelSpace(3), 2, labeled, {{nan, nan}, {nan, 1.0}});
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  const auto spec = spec_for(clean, kAtLogistic, 2, 0.0, true);
  EXPECT_EQ(semi_risk(m, clean, spec).total, semi_risk(m, poisoned, spec).total);
  const auto g_clean = pack_gradient(risk_grad(m, clean, spec));
  const auto g_poison = pack_gradient(risk_grad(m, poisoned, spec));
  EXPECT_EQ(g_clean, g_poison);
}

TEST(SemiRisk, NonNegativeBracket) {
  testing::Gen gen(56);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(9, 2, 3), gen.inputs(5, 2));
    auto m = init_model(ScoreModel::linear(2), 3);
    m.score.set_weights(gen.vector(3, 2.0));
    const Label k = gen.label(3);
    const double gamma = gen.uniform(0.05, 1.0);
    const auto plain = semi_risk(m, d, spec_for(d, kAtLogistic, k, gamma, false));
    const auto clamped = semi_risk(m, d, spec_for(d, kAtLogistic, k, gamma, true));
    const double bracket = plain.u - plain.l2;
    EXPECT_NEAR(clamped.total,
                gamma * (plain.l1 + std::max(0.0, bracket)) + (1.0 - gamma) * plain.sv, 1e-12);
    EXPECT_GE(clamped.total, gamma * plain.l1 + (1.0 - gamma) * plain.sv - 1e-12);
    if (bracket >= 0.0) { EXPECT_NEAR(clamped.total, plain.total, 1e-12); }
  }
}

TEST(ThresholdPenalty, Examples) {
  EXPECT_EQ(threshold_penalty(std::vector<double>{0.0, 1.0}, 10.0), 0.0);
  EXPECT_NEAR(threshold_penalty(std::vector<double>{0.0, 0.5}, 10.0), 6.93147, 1e-5);
  EXPECT_EQ(threshold_penalty(std::vector<double>{0.0, 10.0}, 10.0), 0.0);
  EXPECT_EQ(threshold_penalty(std::vector<double>{0.3}, 10.0), 0.0);
  EXPECT_EQ(threshold_penalty(std::vector<double>{0.0, 0.0}, 10.0),
            std::numeric_limits<double>::infinity());
  EXPECT_EQ(threshold_penalty(std::vector<double>{1.0, 0.0}, 10.0),
            std::numeric_limits<double>::infinity());
  EXPECT_EQ(threshold_penalty(std::vector<double>{1.0, 0.0}, 0.0), 0.0);
}

TEST(ThresholdPenalty, MaxIsOverTheWholeSum) {
  // Gaps 0.5 and 4: -log 0.5 - log 4 < 0, so no penalty even though one gap is small.
  EXPECT_EQ(threshold_penalty(std::vector<double>{0.0, 0.5, 4.5}, 10.0), 0.0);
  EXPECT_NEAR(threshold_penalty(std::vector<double>{0.0, 0.5, 1.0}, 2.0), 4.0 * std::log(2.0), 1e-14);
}

TEST(ThresholdPenalty, GradientMatchesFiniteDifferences) {
  testing::Gen gen(57);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = gen.integer(3, 6);
    const auto theta = gen.ordered_theta(k, 0.05, 1.2);
    const double mu = gen.uniform(0.0, 20.0);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < theta.size(); ++i) sum -= std::log(theta[i + 1] - theta[i]);
    if (std::abs(sum) < 1e-4) continue;  // kink of the max
    const auto fd = testing::numeric_gradient(
        [&](std::span<const double> t) { return threshold_penalty(t, mu); }, theta);
    const auto an = threshold_penalty_grad(theta, mu);
    EXPECT_LE(testing::relative_error(an, fd), 1e-6);
  }
  EXPECT_THROW(threshold_penalty_grad(std::vector<double>{1.0, 1.0}, 10.0), std::domain_error);
}

TEST(RemovedClass, Examples) {
  const std::vector<std::size_t> c = {5, 10, 15};
  EXPECT_EQ(select_removed_class(c, {RemovalStrategy::kSmallest, 1}), 1);
  EXPECT_EQ(select_removed_class(c, {RemovalStrategy::kBound, 1}), 3);
  EXPECT_EQ(select_removed_class(c, {RemovalStrategy::kFixed, 2}), 2);
  const std::vector<std::size_t> tie = {10, 10, 10};
  EXPECT_EQ(select_removed_class(tie, {RemovalStrategy::kSmallest, 1}), 1);
  EXPECT_EQ(select_removed_class(tie, {RemovalStrategy::kBound, 1}), 1);
  EXPECT_THROW(select_removed_class(c, {RemovalStrategy::kFixed, 4}), std::invalid_argument);
}

TEST(RemovedClass, ArgminArgmaxForAllPermutations) {
  std::vector<std::size_t> counts = {3, 7, 12, 20};
  std::sort(counts.begin(), counts.end());
  do {
    const auto mn = std::min_element(counts.begin(), counts.end()) - counts.begin() + 1;
    const auto mx = std::max_element(counts.begin(), counts.end()) - counts.begin() + 1;
    EXPECT_EQ(select_removed_class(counts, {RemovalStrategy::kSmallest, 1}), mn);
    EXPECT_EQ(select_removed_class(counts, {RemovalStrategy::kBound, 1}), mx);
  } while (std::next_permutation(counts.begin(), counts.end()));
}

TEST(RemovedClass, ParseSelector) {
  EXPECT_EQ(parse_class_selector("smallest").strategy, RemovalStrategy::kSmallest);
  EXPECT_EQ(parse_class_selector("bound").strategy, RemovalStrategy::kBound);
  const auto fixed = parse_class_selector("fixed:3");
  EXPECT_EQ(fixed.strategy, RemovalStrategy::kFixed);
  EXPECT_EQ(fixed.fixed_class, 3);
  EXPECT_EQ(to_string(fixed), "fixed:3");
  EXPECT_THROW(parse_class_selector("fixed:"), std::invalid_argument);
  EXPECT_THROW(parse_class_selector("largest"), std::invalid_argument);
}

bool away_from_kinks(const OrdinalModel& m, const OrdinalDataset& d, const RiskSpec& spec) {
  auto check_alpha = [&](std::span<const double> a, Label y) {
    for (double v : a) {
      for (double kink : {-1.0, 1.0}) {
        if (std::abs(v - kink) < 1e-3 || std::abs(-v - kink) < 1e-3) return false;
      }
    }
    return std::abs(y + a[0] - 1.5) > 1e-3;
  };
  const int classes = d.num_classes();
  for (const auto& s : d.labeled()) {
    const auto a = alpha(m, s.x);
    for (Label y = 1; y <= classes; ++y) if (!check_alpha(a, y)) return false;
  }
  for (const auto& x : d.unlabeled()) {
    if (!check_alpha(alpha(m, x), spec.removed_class)) return false;
  }
  const auto r = semi_risk(m, d, spec);
  return std::abs(r.u - r.l2) > 1e-4;
}

TEST(RiskGrad, MatchesFiniteDifferences) {
  testing::Gen gen(58);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 160; ++trial) {
    const auto kind = kSurrogates[static_cast<std::size_t>(trial % 4)];
    const auto binary = std::array{BinaryLoss::kLogistic, BinaryLoss::kSquared,
                                   BinaryLoss::kDoubleHinge, BinaryLoss::kHinge}[static_cast<std::size_t>((trial / 4) % 4)];
    const bool nn = (trial / 16) % 2 == 1;
    const auto d = OrdinalDataset(LabelSpace(3), 3, gen.labeled(9, 3, 3), gen.inputs(20, 3));
    OrdinalModel m = (trial / 32) % 2 == 0
                         ? init_model(ScoreModel::linear(3), 3)
                         : init_model(ScoreModel::kernel(gen.inputs(5, 3), 1.2), 3);
    m.score.set_weights(gen.vector(m.score.num_weights()));
    m.theta = gen.ordered_theta(3, 0.2, 1.5);
    const auto spec = spec_for(d, {kind, binary}, gen.label(3), gen.uniform(0.1, 1.0), nn,
                               gen.uniform(0.0, 10.0));
    if (!away_from_kinks(m, d, spec)) continue;
    double sum = std::log(m.theta[1] - m.theta[0]);
    if (std::abs(sum) < 1e-4) continue;
    ++checked;
    auto objective = [&](std::span<const double> p) {
      OrdinalModel q = m;
      unpack_parameters(p, q);
      return semi_risk(q, d, spec).total + threshold_penalty(q.theta, spec.mu);
    };
    const auto fd = testing::numeric_gradient(objective, pack_parameters(m));
    const auto an = pack_gradient(risk_grad(m, d, spec));
    EXPECT_LE(testing::relative_error(an, fd), 1e-4) << "trial " << trial;
  }
  EXPECT_GE(checked, 100);
}

TEST(RiskGrad, SupervisedOnlyMatchesSupervisedGradient) {
  testing::Gen gen(59);
  const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(10, 2, 3), gen.inputs(4, 2));
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  const auto spec = spec_for(d, kAtLogistic, 1, 0.0, true, 0.0);
  // Direct chain rule: d psi/d w = -(sum_i dpsi/dalpha_i) phi(x), d psi/d theta = dpsi/dalpha.
  std::vector<double> gw(3, 0.0), gt(2, 0.0);
  for (const auto& s : d.labeled()) {
    const auto g = task_surrogate_grad_alpha(kAtLogistic, alpha(m, s.x), s.y);
    const auto phi = m.score.basis(s.x);
    for (std::size_t j = 0; j < 3; ++j) gw[j] -= (g[0] + g[1]) * phi[j] / 10.0;
    gt[0] += g[0] / 10.0;
    gt[1] += g[1] / 10.0;
  }
  const auto grad = risk_grad(m, d, spec);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(grad.weights[j], gw[j], 1e-14);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(grad.theta[j], gt[j], 1e-14);
}

TEST(RiskGrad, InfinitePenaltyIsAnError) {
  const auto d = dataset_with_counts({3, 3, 3}, 4);
  auto m = init_model(ScoreModel::linear(2), 3);
  m.theta = {1.0, 0.5};
  EXPECT_THROW(risk_grad(m, d, spec_for(d, kAtLogistic, 1, 0.8, true)), std::domain_error);
}

TEST(TrainingDirection, FlipsTheClampedBracket) {
  testing::Gen gen(60);
  int clamped_cases = 0;
  for (int trial = 0; trial < 300 && clamped_cases < 20; ++trial) {
    const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(9, 2, 3), gen.inputs(6, 2));
    auto m = init_model(ScoreModel::linear(2), 3);
    m.score.set_weights(gen.vector(3, 2.0));
    const double gamma = 0.8;
    const auto spec = spec_for(d, kAtLogistic, gen.label(3), gamma, true, 0.0);
    const auto r = semi_risk(m, d, spec);
    const auto exact = pack_gradient(risk_grad(m, d, spec));
    const auto dir = pack_gradient(training_direction(m, d, spec));
    if (r.u - r.l2 >= -1e-6) {
      if (r.u - r.l2 > 1e-6) { EXPECT_EQ(exact, dir); }
      continue;
    }
    ++clamped_cases;
    // gamma * grad l1 - gamma * grad (u - l2) + (1 - gamma) * grad sv
    auto part = [&](auto field) {
      return testing::numeric_gradient(
          [&](std::span<const double> p) {
            OrdinalModel q = m;
            unpack_parameters(p, q);
            return field(semi_risk(q, d, spec));
          },
          pack_parameters(m));
    };
    const auto g_l1 = part([](const RiskBreakdown& b) { return b.l1; });
    const auto g_br = part([](const RiskBreakdown& b) { return b.u - b.l2; });
    const auto g_sv = part([](const RiskBreakdown& b) { return b.sv; });
    std::vector<double> expected(g_l1.size()), expected_exact(g_l1.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      expected[i] = gamma * g_l1[i] - gamma * g_br[i] + (1.0 - gamma) * g_sv[i];
      expected_exact[i] = gamma * g_l1[i] + (1.0 - gamma) * g_sv[i];
    }
    EXPECT_LE(testing::relative_error(dir, expected), 1e-5);
    EXPECT_LE(testing::relative_error(exact, expected_exact), 1e-5);
  }
  EXPECT_GT(clamped_cases, 0);
}

TEST(BasisCache, AgreesWithDirectEvaluation) {
  testing::Gen gen(61);
  const auto d = OrdinalDataset(LabelSpace(4), 3, gen.labeled(14, 3, 4), gen.inputs(9, 3));
  for (auto structure : {ScoreModel::linear(3), ScoreModel::kernel(gen.inputs(6, 3), 0.8)}) {
    auto m = init_model(structure, 4);
    m.score.set_weights(gen.vector(m.score.num_weights()));
    const auto spec = spec_for(d, {SurrogateKind::kImmediateThreshold, BinaryLoss::kLogistic}, 2,
                               0.6, true, 3.0);
    const BasisCache cache(m.score, d.labeled(), d.unlabeled());
    ModelGradient g;
    const auto v = evaluate_objective(cache, m, spec, &g);
    EXPECT_NEAR(v.risk.total, semi_risk(m, d, spec).total, 1e-12);
    EXPECT_NEAR(v.penalty, threshold_penalty(m.theta, 3.0), 1e-12);
    EXPECT_LE(testing::relative_error(pack_gradient(g), pack_gradient(risk_grad(m, d, spec))),
              1e-12);
  }
}

TEST(VarianceRatio, ConstantLossIsDegenerate) {
  const auto d = dataset_with_counts({10, 10, 10}, 50);
  auto m = init_model(ScoreModel::linear(2), 3);
  m.theta = {0.0, 0.0};
  const auto spec = spec_for(d, kAtLogistic, 1, 1.0, false);
  EXPECT_THROW(variance_ratio(d, spec, m, 50, {10, 20}, 3), std::domain_error);
}

TEST(VarianceRatio, SeededAndDeterministic) {
  testing::Gen gen(62);
  const auto d = OrdinalDataset(LabelSpace(3), 2, gen.labeled(60, 2, 3, 5), gen.inputs(100, 2));
  auto m = init_model(ScoreModel::linear(2), 3);
  m.score.set_weights(gen.vector(3));
  const auto spec = spec_for(d, kAtLogistic, 2, 1.0, false);
  const double a = variance_ratio(d, spec, m, 200, {15, 50}, 9);
  EXPECT_EQ(a, variance_ratio(d, spec, m, 200, {15, 50}, 9));
  EXPECT_NE(a, variance_ratio(d, spec, m, 200, {15, 50}, 10));
  EXPECT_GT(a, 0.0);
  EXPECT_THROW(variance_ratio(d, spec, m, 1, {15, 50}, 9), std::invalid_argument);
}

TEST(RiskSpec, Validation) {
  const auto d = dataset_with_counts({3, 3, 3}, 3);
  auto spec = spec_for(d, kAtLogistic, 1, 0.8, true);
  EXPECT_NO_THROW(spec.validate(3));
  EXPECT_THROW(spec.validate(4), std::invalid_argument);
  spec.gamma = 1.5;
  EXPECT_THROW(spec.validate(3), std::invalid_argument);
  spec.gamma = 0.5;
  spec.removed_class = 0;
  EXPECT_THROW(spec.validate(3), std::invalid_argument);
  spec.removed_class = 1;
  spec.mu = -1.0;
  EXPECT_THROW(spec.validate(3), std::invalid_argument);
}

}  // namespace
}  // namespace ssor
