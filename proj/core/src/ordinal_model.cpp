#include "ssor/ordinal_model.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace ssor {

Label predict_from_score(double f, std::span<const double> theta) {
  Label y = 1;
  for (double t : theta) {
    if (f > t) ++y;
  }
  return y;
}

Label predict(const OrdinalModel& model, std::span<const double> x) {
  return predict_from_score(model.score.score(x), model.theta);
}

AlphaVector alpha_from_score(double f, std::span<const double> theta) {
  AlphaVector a(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) a[i] = theta[i] - f;
  return a;
}

AlphaVector alpha(const OrdinalModel& model, std::span<const double> x) {
  return alpha_from_score(model.score.score(x), model.theta);
}

bool thresholds_ordered(std::span<const double> theta) noexcept {
  for (std::size_t i = 1; i < theta.size(); ++i) {
    if (!(theta[i - 1] <= theta[i])) return false;
  }
  return true;
}

bool thresholds_strictly_increasing(std::span<const double> theta) noexcept {
  for (std::size_t i = 1; i < theta.size(); ++i) {
    if (!(theta[i - 1] < theta[i])) return false;
  }
  return true;
}

OrdinalModel init_model(ScoreModel score, int num_classes) {
  const LabelSpace labels(num_classes);
  ThresholdVector theta(static_cast<std::size_t>(labels.num_thresholds()));
  for (int i = 1; i < num_classes; ++i) {
    theta[static_cast<std::size_t>(i - 1)] = -1.0 + 2.0 * i / num_classes;
  }
  auto zeros = std::vector<double>(score.num_weights(), 0.0);
  score.set_weights(std::move(zeros));
  return OrdinalModel{std::move(score), std::move(theta)};
}

std::vector<double> pack_parameters(const OrdinalModel& model) {
  std::vector<double> params(model.score.weights().begin(), model.score.weights().end());
  params.insert(params.end(), model.theta.begin(), model.theta.end());
  return params;
}

void unpack_parameters(std::span<const double> params, OrdinalModel& model) {
  const std::size_t nw = model.score.num_weights();
  if (params.size() != nw + model.theta.size()) {
    throw std::invalid_argument("parameter vector length does not match the model");
  }
  std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(nw),
            model.score.weights().begin());
  std::copy(params.begin() + static_cast<std::ptrdiff_t>(nw), params.end(), model.theta.begin());
}

std::vector<double> pack_gradient(const ModelGradient& grad) {
  std::vector<double> out = grad.weights;
  out.insert(out.end(), grad.theta.begin(), grad.theta.end());
  return out;
}

namespace {

void write_real(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

void write_record(std::ostream& out, std::string_view key, std::span<const double> values) {
  out << key;
  for (double v : values) {
    out << ',';
    write_real(out, v);
  }
  out << '\n';
}

double parse_real(std::string_view text, int line_no) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("model file line " + std::to_string(line_no) +
                             ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

struct Record {
  std::string key;
  std::vector<std::string> fields;
  int line_no = 0;
};

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Record rec;
    rec.line_no = line_no;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, rec.key, ',');
    while (std::getline(ss, field, ',')) rec.fields.push_back(field);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<double> reals(const Record& rec) {
  std::vector<double> out;
  out.reserve(rec.fields.size());
  for (const auto& f : rec.fields) out.push_back(parse_real(f, rec.line_no));
  return out;
}

const Record& expect(const std::vector<Record>& records, std::size_t i, std::string_view key) {
  if (i >= records.size() || records[i].key != key) {
    throw std::runtime_error("model file: expected record '" + std::string(key) + "'");
  }
  return records[i];
}

long parse_int(const Record& rec) {
  if (rec.fields.size() != 1) {
    throw std::runtime_error("model file line " + std::to_string(rec.line_no) +
                             ": expected a single integer");
  }
  long v = 0;
  const auto& s = rec.fields[0];
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("model file line " + std::to_string(rec.line_no) +
                             ": cannot parse integer '" + s + "'");
  }
  return v;
}

}  // namespace

void save_model(const OrdinalModel& model, std::ostream& out) {
  out << "kind," << to_string(model.score.kind()) << '\n';
  out << "d," << model.score.input_dim() << '\n';
  out << "K," << model.num_classes() << '\n';
  write_record(out, "theta", model.theta);
  write_record(out, "weights", model.score.weights());
  if (model.score.kind() == ModelKind::kKernel) {
    const double sigma = model.score.bandwidth();
    write_record(out, "sigma", std::span<const double>(&sigma, 1));
    for (const auto& c : model.score.centers()) write_record(out, "center", c);
  }
}

OrdinalModel load_model(std::istream& in) {
  const auto records = read_records(in);
  const auto& kind_rec = expect(records, 0, "kind");
  if (kind_rec.fields.size() != 1) throw std::runtime_error("model file: malformed kind record");
  const ModelKind kind = parse_model_kind(kind_rec.fields[0]);
  const long dim = parse_int(expect(records, 1, "d"));
  const long classes = parse_int(expect(records, 2, "K"));
  if (dim < 1) throw std::runtime_error("model file: d must be >= 1");
  auto theta = reals(expect(records, 3, "theta"));
  auto weights = reals(expect(records, 4, "weights"));
  if (static_cast<long>(theta.size()) != classes - 1) {
    throw std::runtime_error("model file: theta length does not match K");
  }
  if (kind == ModelKind::kLinear) {
    if (records.size() != 5) throw std::runtime_error("model file: trailing records");
    auto score = ScoreModel::linear(static_cast<std::size_t>(dim));
    score.set_weights(std::move(weights));
    return OrdinalModel{std::move(score), std::move(theta)};
  }
  const auto sigma = reals(expect(records, 5, "sigma"));
  if (sigma.size() != 1) throw std::runtime_error("model file: malformed sigma record");
  std::vector<FeatureVector> centers;
  for (std::size_t i = 6; i < records.size(); ++i) {
    auto c = reals(expect(records, i, "center"));
    if (static_cast<long>(c.size()) != dim) {
      throw std::runtime_error("model file line " + std::to_string(records[i].line_no) +
                               ": center dimension does not match d");
    }
    centers.push_back(std::move(c));
  }
  auto score = ScoreModel::kernel(std::move(centers), sigma[0]);
  score.set_weights(std::move(weights));
  return OrdinalModel{std::move(score), std::move(theta)};
}

void save_model_file(const OrdinalModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_model(model, out);
  if (!out) throw std::runtime_error("failed writing model to '" + path + "'");
}

OrdinalModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace ssor
