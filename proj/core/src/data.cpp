#include "ssor/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace ssor {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, std::size_t column,
                              const std::string& what) {
  std::ostringstream msg;
  msg << source << ": line " << line;
  if (column > 0) msg << ", column " << column;
  msg << ": " << what;
  throw std::runtime_error(msg.str());
}

}  // namespace

RawTable parse_csv(std::istream& in, bool has_header, const std::string& source_name) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      parse_error(source_name, line_no, 0, "expected at least 2 columns, found " +
                                               std::to_string(fields.size()));
    }
    const std::size_t dim = fields.size() - 1;
    if (table.rows.empty()) {
      table.dim = dim;
    } else if (dim != table.dim) {
      parse_error(source_name, line_no, 0,
                  "inconsistent width: expected " + std::to_string(table.dim + 1) +
                      " columns, found " + std::to_string(fields.size()));
    }
    RawRow row;
    row.features.resize(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row.features[c]);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() ||
          !std::isfinite(row.features[c])) {
        parse_error(source_name, line_no, c + 1, "not a finite real: '" + std::string(f) + "'");
      }
    }
    const auto lab = fields[dim];
    const auto [ptr, ec] = std::from_chars(lab.data(), lab.data() + lab.size(), row.raw_label);
    if (lab.empty() || ec != std::errc() || ptr != lab.data() + lab.size()) {
      parse_error(source_name, line_no, dim + 1, "label is not an integer: '" +
                                                     std::string(lab) + "'");
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error(source_name + ": no data rows");
  return table;
}

RawTable load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  return parse_csv(in, has_header, path);
}

RawTable merge_classes(const RawTable& table, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("number of classes must be >= 2");
  std::map<long, std::size_t> counts;
  for (const auto& r : table.rows) ++counts[r.raw_label];
  const std::size_t m = counts.size();
  const auto k = static_cast<std::size_t>(num_classes);
  if (m < k) {
    throw std::invalid_argument("only " + std::to_string(m) + " distinct labels; cannot form " +
                                std::to_string(num_classes) + " classes");
  }
  std::vector<long> raw;
  std::vector<double> prefix{0.0};
  for (const auto& [label, c] : counts) {
    raw.push_back(label);
    prefix.push_back(prefix.back() + static_cast<double>(c));
  }
  const double target = prefix.back() / static_cast<double>(k);

  // cost[j][i]: best cost of putting the first i distinct labels into j bins.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(k + 1, std::vector<double>(m + 1, kInf));
  std::vector<std::vector<std::size_t>> cut(k + 1, std::vector<std::size_t>(m + 1, 0));
  cost[0][0] = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t i = j; i <= m; ++i) {
      for (std::size_t p = j - 1; p < i; ++p) {
        if (cost[j - 1][p] == kInf) continue;
        const double g = prefix[i] - prefix[p] - target;
        const double c = cost[j - 1][p] + g * g;
        if (c < cost[j][i]) {
          cost[j][i] = c;
          cut[j][i] = p;
        }
      }
    }
  }
  std::map<long, Label> relabel;
  std::size_t end = m;
  for (std::size_t j = k; j >= 1; --j) {
    const std::size_t begin = cut[j][end];
    for (std::size_t i = begin; i < end; ++i) relabel[raw[i]] = static_cast<Label>(j);
    end = begin;
  }

  RawTable out = table;
  for (auto& r : out.rows) r.raw_label = relabel.at(r.raw_label);
  return out;
}

void SplitSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("number of classes must be >= 2");
  if (n_labeled < static_cast<std::size_t>(num_classes)) {
    throw std::invalid_argument("n_labeled must be at least the number of classes");
  }
  if (!(unlabeled_fraction > 0.0 && unlabeled_fraction < 1.0)) {
    throw std::invalid_argument("unlabeled fraction must lie in (0, 1)");
  }
}

Splits make_splits(const RawTable& table, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = table.rows.size();
  if (n < spec.n_labeled + 2) {
    throw std::invalid_argument("need at least n_labeled + 2 = " +
                                std::to_string(spec.n_labeled + 2) + " rows, found " +
                                std::to_string(n));
  }
  const LabelSpace labels(spec.num_classes);
  for (const auto& r : table.rows) {
    if (r.raw_label < 1 || r.raw_label > spec.num_classes) {
      throw std::invalid_argument("label " + std::to_string(r.raw_label) +
                                  " outside 1.." + std::to_string(spec.num_classes) +
                                  "; merge classes first");
    }
  }

  std::vector<std::string> warnings;
  std::vector<std::size_t> order(n);
  std::mt19937_64 rng(spec.seed);
  constexpr int kAttempts = 10;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> seen(static_cast<std::size_t>(spec.num_classes), false);
    for (std::size_t i = 0; i < spec.n_labeled; ++i) {
      seen[static_cast<std::size_t>(table.rows[order[i]].raw_label - 1)] = true;
    }
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) break;
    if (attempt + 1 == kAttempts) {
      warnings.push_back("labeled subset misses a class after " + std::to_string(kAttempts) +
                         " shuffles");
    }
  }

  const std::size_t rest = n - spec.n_labeled;
  const auto n_unlabeled = static_cast<std::size_t>(
      std::llround(spec.unlabeled_fraction * static_cast<double>(rest)));

  std::vector<double> mean(table.dim, 0.0);
  std::vector<double> scale(table.dim, 1.0);
  const std::size_t pool = spec.n_labeled + n_unlabeled;
  if (spec.standardize) {
    for (std::size_t i = 0; i < pool; ++i) {
      const auto& x = table.rows[order[i]].features;
      for (std::size_t c = 0; c < table.dim; ++c) mean[c] += x[c];
    }
    for (auto& m : mean) m /= static_cast<double>(pool);
    std::vector<double> var(table.dim, 0.0);
    for (std::size_t i = 0; i < pool; ++i) {
      const auto& x = table.rows[order[i]].features;
      for (std::size_t c = 0; c < table.dim; ++c) var[c] += (x[c] - mean[c]) * (x[c] - mean[c]);
    }
    for (std::size_t c = 0; c < table.dim; ++c) {
      const double sd = std::sqrt(var[c] / static_cast<double>(pool));
      scale[c] = sd > 0.0 ? sd : 1.0;
    }
  }
  auto transform = [&](const FeatureVector& x) {
    FeatureVector z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = (x[c] - mean[c]) / scale[c];
    return z;
  };

  std::vector<LabeledSample> labeled;
  std::vector<FeatureVector> unlabeled;
  std::vector<LabeledSample> test;
  labeled.reserve(spec.n_labeled);
  unlabeled.reserve(n_unlabeled);
  test.reserve(n - pool);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[order[i]];
    const auto y = static_cast<Label>(row.raw_label);
    if (i < spec.n_labeled) {
      labeled.push_back({transform(row.features), y});
    } else if (i < pool) {
      unlabeled.push_back(transform(row.features));
    } else {
      test.push_back({transform(row.features), y});
    }
  }
  return Splits{OrdinalDataset(labels, table.dim, std::move(labeled), std::move(unlabeled)),
                std::move(test), std::move(warnings)};
}

namespace {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double standard_normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (standard_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RawTable make_synthetic(const SyntheticSpec& spec) {
  if (spec.rows == 0 || spec.dim == 0) throw std::invalid_argument("empty synthetic table");
  if (spec.num_classes < 2) throw std::invalid_argument("number of classes must be >= 2");
  if (!(spec.score_noise >= 0.0)) throw std::invalid_argument("score noise must be >= 0");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) {
    throw std::invalid_argument("label noise must lie in [0, 1]");
  }
  std::mt19937_64 structure_rng(spec.structure_seed);
  std::normal_distribution<double> direction(0.0, 1.0);
  std::vector<double> w(spec.dim);
  for (auto& v : w) v = direction(structure_rng);
  const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
  for (auto& v : w) v /= norm;

  const double spread = std::sqrt(1.0 + spec.score_noise * spec.score_noise);
  std::vector<double> cuts;
  for (int i = 1; i < spec.num_classes; ++i) {
    cuts.push_back(spread * standard_normal_quantile(static_cast<double>(i) / spec.num_classes));
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> other(1, spec.num_classes - 1);
  RawTable table;
  table.dim = spec.dim;
  table.rows.reserve(spec.rows);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    RawRow row;
    row.features.resize(spec.dim);
    for (auto& v : row.features) v = normal(rng);
    const double s = std::inner_product(w.begin(), w.end(), row.features.begin(), 0.0) +
                     spec.score_noise * normal(rng);
    long y = 1 + static_cast<long>(std::count_if(cuts.begin(), cuts.end(),
                                                  [s](double c) { return s > c; }));
    if (unit(rng) < spec.label_noise) {
      const int draw = other(rng);
      y = draw >= y ? draw + 1 : draw;
    }
    row.raw_label = y;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const RawTable& table, std::ostream& out) {
  char buf[64];
  for (const auto& r : table.rows) {
    for (double v : r.features) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << r.raw_label << '\n';
  }
}

}  // namespace ssor
