#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ssor/data.hpp"
#include "../support/generators.hpp"

namespace ssor {
namespace {

RawTable parse(const std::string& text, bool has_header = false) {
  std::istringstream in(text);
  return parse_csv(in, has_header, "test.csv");
}

std::string parse_error(const std::string& text, bool has_header = false) {
  try {
    parse(text, has_header);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

RawTable table_with_labels(const std::vector<long>& labels, std::size_t dim = 2,
                           std::uint64_t seed = 3) {
  testing::Gen gen(seed);
  RawTable t;
  t.dim = dim;
  for (long y : labels) t.rows.push_back({gen.vector(dim), y});
  return t;
}

TEST(ParseCsv, Example) {
  const auto t = parse("1.0,2.0,3\n0.0,1.0,1\n");
  EXPECT_EQ(t.dim, 2u);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].features, (FeatureVector{1.0, 2.0}));
  EXPECT_EQ(t.rows[0].raw_label, 3);
  EXPECT_EQ(t.rows[1].raw_label, 1);
}

TEST(ParseCsv, HeaderWhitespaceAndBlankLines) {
  const auto t = parse("a,b,label\n 1.5 , -2e-3 ,7\n\n4,5,-1\r\n", true);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].features, (FeatureVector{1.5, -2e-3}));
  EXPECT_EQ(t.rows[1].raw_label, -1);
}

TEST(ParseCsv, Diagnostics) {
  EXPECT_NE(parse_error("").find("no data rows"), std::string::npos);
  EXPECT_NE(parse_error("x,y\n", true).find("no data rows"), std::string::npos);
  const auto width = parse_error("1,2,3\n1,2\n");
  EXPECT_NE(width.find("test.csv"), std::string::npos);
  EXPECT_NE(width.find("line 2"), std::string::npos);
  const auto bad = parse_error("1,2,3\n1,abc,3\n");
  EXPECT_NE(bad.find("line 2, column 2"), std::string::npos);
  EXPECT_NE(parse_error("1,2,2.5\n").find("column 3"), std::string::npos);
  EXPECT_FALSE(parse_error("5\n").empty());
  EXPECT_THROW(load_csv("/nonexistent/file.csv", false), std::runtime_error);
}

TEST(MergeClasses, EqualCountsPairUp) {
  std::vector<long> labels;
  for (long y = 1; y <= 6; ++y) labels.insert(labels.end(), 5, y);
  const auto merged = merge_classes(table_with_labels(labels), 3);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(merged.rows[i].raw_label, (labels[i] + 1) / 2);
  }
}

TEST(MergeClasses, IdentityWhenAlreadyK) {
  const std::vector<long> labels = {10, 20, 30, 10, 30, 30};
  const auto merged = merge_classes(table_with_labels(labels), 3);
  const std::map<long, long> expected = {{10, 1}, {20, 2}, {30, 3}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(merged.rows[i].raw_label, expected.at(labels[i]));
  }
  EXPECT_THROW(merge_classes(table_with_labels({1, 2, 2}), 3), std::invalid_argument);
}

TEST(MergeClasses, MonotoneAndSurjective) {
  testing::Gen gen(81);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = gen.integer(2, 5);
    const int distinct = gen.integer(k, 12);
    std::vector<long> labels;
    for (int v = 0; v < distinct; ++v) labels.push_back(3 * v - 7);  // every value appears
    const int extra = gen.integer(0, 60);
    for (int j = 0; j < extra; ++j) labels.push_back(3 * gen.integer(0, distinct - 1) - 7);
    const auto table = table_with_labels(labels, 1);
    const auto merged = merge_classes(table, k);
    std::set<long> image;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      image.insert(merged.rows[i].raw_label);
      for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[i] < labels[j]) { EXPECT_LE(merged.rows[i].raw_label, merged.rows[j].raw_label); }
        if (labels[i] == labels[j]) { EXPECT_EQ(merged.rows[i].raw_label, merged.rows[j].raw_label); }
      }
    }
    EXPECT_EQ(image.size(), static_cast<std::size_t>(k));
    EXPECT_EQ(*image.begin(), 1);
    EXPECT_EQ(*image.rbegin(), k);
  }
}

TEST(MergeClasses, BalancesGroupSizes) {
  // Counts 1,1,1,1,8: the lone large value must stand alone.
  const auto merged = merge_classes(table_with_labels({1, 2, 3, 4, 5, 5, 5, 5, 5, 5, 5, 5}), 2);
  EXPECT_EQ(merged.rows[0].raw_label, 1);
  EXPECT_EQ(merged.rows[3].raw_label, 1);
  EXPECT_EQ(merged.rows[4].raw_label, 2);
}

RawTable hundred_rows() {
  std::vector<long> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 3 + 1);
  auto t = table_with_labels(labels, 3, 9);
  // Distinct first feature so rows can be traced through the split.
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].features[0] = static_cast<double>(i);
  return t;
}

TEST(MakeSplits, SizesAndDeterminism) {
  const auto table = hundred_rows();
  SplitSpec spec;
  spec.seed = 4;
  const auto a = make_splits(table, spec);
  EXPECT_EQ(a.train.num_labeled(), 30u);
  EXPECT_EQ(a.train.num_unlabeled(), 35u);
  EXPECT_EQ(a.test.size(), 35u);
  EXPECT_TRUE(a.warnings.empty());
  const auto b = make_splits(table, spec);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(a.train.labeled()[i].x, b.train.labeled()[i].x);
  spec.seed = 5;
  const auto c = make_splits(table, spec);
  bool differs = false;
  for (std::size_t i = 0; i < 30; ++i) differs |= a.train.labeled()[i].x != c.train.labeled()[i].x;
  EXPECT_TRUE(differs);
}

TEST(MakeSplits, StandardizesOnTrainingInputs) {
  SplitSpec spec;
  spec.seed = 11;
  const auto s = make_splits(hundred_rows(), spec);
  std::vector<FeatureVector> pool;
  for (const auto& l : s.train.labeled()) pool.push_back(l.x);
  for (const auto& u : s.train.unlabeled()) pool.push_back(u);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (const auto& x : pool) mean += x[c];
    mean /= static_cast<double>(pool.size());
    double var = 0.0;
    for (const auto& x : pool) var += (x[c] - mean) * (x[c] - mean);
    var /= static_cast<double>(pool.size());
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-10);
  }
}

TEST(MakeSplits, PartitionsTheRows) {
  SplitSpec spec;
  spec.seed = 12;
  spec.standardize = false;
  const auto table = hundred_rows();
  const auto s = make_splits(table, spec);
  std::multiset<double> ids;
  for (const auto& l : s.train.labeled()) {
    ids.insert(l.x[0]);
    EXPECT_EQ(l.y, table.rows[static_cast<std::size_t>(l.x[0])].raw_label);
  }
  for (const auto& u : s.train.unlabeled()) ids.insert(u[0]);
  for (const auto& t : s.test) {
    ids.insert(t.x[0]);
    EXPECT_EQ(t.y, table.rows[static_cast<std::size_t>(t.x[0])].raw_label);
  }
  ASSERT_EQ(ids.size(), 100u);
  EXPECT_EQ(std::set<double>(ids.begin(), ids.end()).size(), 100u);
}

TEST(MakeSplits, TestRowsDoNotAffectTraining) {
  // Changing the features of test rows leaves the training data untouched.
  SplitSpec spec;
  spec.seed = 13;
  const auto table = hundred_rows();
  const auto s = make_splits(table, spec);
  auto altered = table;
  std::set<std::size_t> test_ids;
  {
    spec.standardize = false;
    for (const auto& t : make_splits(table, spec).test) test_ids.insert(static_cast<std::size_t>(t.x[0]));
    spec.standardize = true;
  }
  for (std::size_t id : test_ids) {
    altered.rows[id].features[1] = 1e6;
    altered.rows[id].features[2] = -1e6;
  }
  const auto s2 = make_splits(altered, spec);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(s.train.labeled()[i].x, s2.train.labeled()[i].x);
  for (std::size_t i = 0; i < s.train.num_unlabeled(); ++i) {
    EXPECT_EQ(s.train.unlabeled()[i], s2.train.unlabeled()[i]);
  }
}

TEST(MakeSplits, CoversClassesOrWarns) {
  SplitSpec spec;
  spec.n_labeled = 3;
  std::vector<long> labels(60, 1);
  labels[7] = 2;
  labels[31] = 3;
  // Two rare classes among 60 rows: ten shuffles almost never cover them.
  const auto s = make_splits(table_with_labels(labels), spec);
  EXPECT_EQ(s.warnings.size(), 1u);
  labels.assign(60, 0);
  for (std::size_t i = 0; i < 60; ++i) labels[i] = static_cast<long>(i % 3) + 1;
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto s2 = make_splits(table_with_labels(labels), spec);
    std::set<Label> seen;
    for (const auto& l : s2.train.labeled()) seen.insert(l.y);
    EXPECT_EQ(seen.size() == 3u, s2.warnings.empty()) << "seed " << seed;
    covered += seen.size() == 3u;
  }
  EXPECT_GE(covered, 15);
}

TEST(MakeSplits, RejectsBadInput) {
  SplitSpec spec;
  EXPECT_THROW(make_splits(table_with_labels(std::vector<long>(31, 1)), spec),
               std::invalid_argument);
  EXPECT_THROW(make_splits(table_with_labels(std::vector<long>(40, 4)), spec),
               std::invalid_argument);
  spec.unlabeled_fraction = 1.0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = SplitSpec{};
  spec.n_labeled = 2;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Synthetic, ShapeBalanceAndDeterminism) {
  SyntheticSpec spec;
  spec.rows = 3000;
  spec.label_noise = 0.0;
  const auto t = make_synthetic(spec);
  EXPECT_EQ(t.rows.size(), 3000u);
  EXPECT_EQ(t.dim, 5u);
  std::map<long, int> counts;
  for (const auto& r : t.rows) ++counts[r.raw_label];
  ASSERT_EQ(counts.size(), 3u);
  for (const auto& [y, n] : counts) EXPECT_NEAR(n, 1000, 120) << "class " << y;
  const auto again = make_synthetic(spec);
  EXPECT_EQ(again.rows.back().features, t.rows.back().features);
  spec.seed = 1;
  EXPECT_NE(make_synthetic(spec).rows.front().features, t.rows.front().features);
}

TEST(Synthetic, RejectsBadSpecs) {
  SyntheticSpec spec;
  spec.rows = 0;
  EXPECT_THROW(make_synthetic(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.label_noise = 1.5;
  EXPECT_THROW(make_synthetic(spec), std::invalid_argument);
  spec = SyntheticSpec{};
  spec.num_classes = 1;
  EXPECT_THROW(make_synthetic(spec), std::invalid_argument);
}

TEST(WriteCsv, RoundTrips) {
  SyntheticSpec spec;
  spec.rows = 50;
  const auto t = make_synthetic(spec);
  std::ostringstream out;
  write_csv(t, out);
  const auto back = parse(out.str());
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].features, t.rows[i].features);
    EXPECT_EQ(back.rows[i].raw_label, t.rows[i].raw_label);
  }
}

}  // namespace
}  // namespace ssor
