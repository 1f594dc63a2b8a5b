#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssor/types.hpp"

namespace ssor {

struct RawRow {
  FeatureVector features;
  long raw_label;
};

struct RawTable {
  std::vector<RawRow> rows;
  std::size_t dim = 0;
};

/// Comma-separated reals with an integer label in the last column. Errors carry the
/// source name plus row and column.
RawTable parse_csv(std::istream& in, bool has_header, const std::string& source_name);
RawTable load_csv(const std::string& path, bool has_header);

/// Relabels to 1..num_classes by grouping the sorted distinct raw labels into contiguous
/// bins whose sizes are as close to n / num_classes as possible (least squares).
RawTable merge_classes(const RawTable& table, int num_classes);

struct SplitSpec {
  std::size_t n_labeled = 30;
  int num_classes = 3;
  /// Share of the non-labeled rows used as unlabeled data; the rest is the test set.
  double unlabeled_fraction = 0.5;
  std::uint64_t seed = 0;
  bool standardize = true;

  void validate() const;
};

struct Splits {
  OrdinalDataset train;
  std::vector<LabeledSample> test;
  std::vector<std::string> warnings;
};

/// Shuffles, takes n_labeled labeled rows (reshuffling up to 10 times when a class is
/// missing, then accepting with a warning), and divides the rest into unlabeled and test
/// rows. Standardization statistics come from the labeled and unlabeled inputs only.
Splits make_splits(const RawTable& table, const SplitSpec& spec);

/// Latent-score ordinal data: x ~ N(0, I_d), s = w.x / |w| + N(0, score_noise^2), labels
/// from equal-probability cuts of s, then each label replaced with a different uniform
/// label with probability label_noise. The direction w depends only on structure_seed,
/// so tables drawn with different `seed`s share one distribution.
struct SyntheticSpec {
  std::size_t rows = 1000;
  std::size_t dim = 5;
  int num_classes = 3;
  double score_noise = 0.5;
  double label_noise = 0.1;
  std::uint64_t seed = 0;
  std::uint64_t structure_seed = 2024;
};

RawTable make_synthetic(const SyntheticSpec& spec);

void write_csv(const RawTable& table, std::ostream& out);

}  // namespace ssor
