#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqboost/common.hpp"

namespace cvqboost {

// Labeled dataset with {-1,+1} labels. Feature matrix is samples x features.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;
  std::vector<std::string> feature_names;

  Eigen::Index num_samples() const { return features.rows(); }
  Eigen::Index num_features() const { return features.cols(); }

  int count_label(int y) const {
    int n = 0;
    for (Eigen::Index s = 0; s < labels.size(); ++s) n += (labels[s] == y);
    return n;
  }

  // the less frequent label; +1 wins ties (positive class = event of interest)
  int minority_label() const {
    return count_label(+1) <= count_label(-1) ? +1 : -1;
  }

  void validate() const {
    if (features.rows() < 1 || features.cols() < 1)
      throw std::invalid_argument("dataset: empty feature matrix");
    if (features.rows() != labels.size())
      throw std::invalid_argument("dataset: label count does not match rows");
    if (static_cast<Eigen::Index>(feature_names.size()) != features.cols())
      throw std::invalid_argument("dataset: feature name count mismatch");
    for (Eigen::Index s = 0; s < labels.size(); ++s)
      if (labels[s] != 1 && labels[s] != -1)
        throw std::invalid_argument("dataset: labels must be -1 or +1");
    if (!features.allFinite())
      throw std::invalid_argument("dataset: non-finite feature value");
  }
};

// Per-column standardization parameters. Degenerate (constant) columns are
// stored as mean 0 / std 1 so they pass through both standardize and
// apply_scaler unchanged.
struct ScalerParams {
  std::vector<double> means;
  std::vector<double> std_devs;
};

struct SyntheticSpec {
  Eigen::Index n_samples = 1000;
  Eigen::Index n_features = 20;
  Eigen::Index n_informative = 10;
  double class_sep = 1.0;
  double minority_fraction = 0.5;
  double flip_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 1) throw std::invalid_argument("synthetic: n_samples < 1");
    if (n_features < 1) throw std::invalid_argument("synthetic: n_features < 1");
    if (n_informative < 1 || n_informative > n_features)
      throw std::invalid_argument("synthetic: need 1 <= n_informative <= n_features");
    if (!(class_sep > 0.0)) throw std::invalid_argument("synthetic: class_sep must be positive");
    if (!(minority_fraction > 0.0) || minority_fraction > 0.5)
      throw std::invalid_argument("synthetic: minority_fraction must be in (0, 0.5]");
    if (minority_fraction * static_cast<double>(n_samples) < 1.0)
      throw std::invalid_argument("synthetic: minority_fraction * n_samples < 1");
    if (flip_fraction < 0.0 || flip_fraction >= 0.5)
      throw std::invalid_argument("synthetic: flip_fraction must be in [0, 0.5)");
  }
};

namespace detail {

// RFC-4180 style record reader: quoted fields may contain commas, doubled
// quotes and newlines. Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t& line_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  ++line_no;
  while (true) {
    if (c == EOF) break;
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        int peek = in.peek();
        if (peek == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
    c = in.get();
  }
  fields.push_back(std::move(field));
  return true;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{}) return false;
  while (p < e && (*p == ' ' || *p == '\t')) ++p;
  return p == e;
}

inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace detail

// Loads a headered CSV. The label column is mapped to +1 where its raw string
// equals positive_label and to -1 otherwise; remaining columns must parse as
// finite doubles and keep their header order.
inline Dataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& positive_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!detail::read_csv_record(in, fields, line_no))
    throw std::runtime_error("load_csv: '" + path + "' is empty");

  std::ptrdiff_t label_idx = -1;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == label_column) {
      if (label_idx >= 0)
        throw std::runtime_error("load_csv: duplicate label column '" + label_column + "'");
      label_idx = static_cast<std::ptrdiff_t>(i);
    } else {
      names.push_back(fields[i]);
    }
  }
  if (label_idx < 0)
    throw std::runtime_error("load_csv: label column '" + label_column +
                             "' not found in header of '" + path + "'");
  const std::size_t n_cols = fields.size();
  const std::size_t n_feat = n_cols - 1;
  if (n_feat == 0) throw std::runtime_error("load_csv: no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  while (detail::read_csv_record(in, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != n_cols) {
      std::ostringstream os;
      os << "load_csv: line " << line_no << ": expected " << n_cols
         << " fields, got " << fields.size();
      throw std::runtime_error(os.str());
    }
    for (std::size_t i = 0; i < n_cols; ++i) {
      if (static_cast<std::ptrdiff_t>(i) == label_idx) {
        labels.push_back(fields[i] == positive_label ? +1 : -1);
        continue;
      }
      double v;
      if (!detail::parse_double(fields[i], v) || !std::isfinite(v)) {
        std::size_t name_idx = i - (static_cast<std::ptrdiff_t>(i) > label_idx ? 1 : 0);
        std::ostringstream os;
        os << "load_csv: line " << line_no << ", column '" << names[name_idx]
           << "': cannot parse '" << fields[i] << "' as a finite number";
        throw std::runtime_error(os.str());
      }
      values.push_back(v);
    }
  }
  if (labels.empty()) throw std::runtime_error("load_csv: '" + path + "' has no data rows");

  Dataset ds;
  ds.feature_names = std::move(names);
  ds.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  ds.features.resize(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n_feat));
  for (Eigen::Index s = 0; s < ds.features.rows(); ++s)
    for (Eigen::Index f = 0; f < ds.features.cols(); ++f)
      ds.features(s, f) = values[static_cast<std::size_t>(s) * n_feat + static_cast<std::size_t>(f)];
  ds.validate();
  return ds;
}

// Feature-only loader for prediction inputs; label_column, when present in the
// header, is skipped.
inline Dataset load_csv_features(const std::string& path, const std::string& label_column = "") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!detail::read_csv_record(in, fields, line_no))
    throw std::runtime_error("load_csv: '" + path + "' is empty");
  bool has_label = !label_column.empty() &&
                   std::find(fields.begin(), fields.end(), label_column) != fields.end();
  in.close();
  if (has_label) return load_csv(path, label_column, "__cvqboost_unused__");

  // no label column: parse everything as features, attach dummy labels
  std::ifstream in2(path, std::ios::binary);
  line_no = 0;
  detail::read_csv_record(in2, fields, line_no);
  std::vector<std::string> names = fields;
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (detail::read_csv_record(in2, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != names.size())
      throw std::runtime_error("load_csv: ragged row at line " + std::to_string(line_no));
    for (auto& f : fields) {
      double v;
      if (!detail::parse_double(f, v) || !std::isfinite(v))
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                 ": cannot parse '" + f + "' as a finite number");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("load_csv: '" + path + "' has no data rows");
  Dataset ds;
  ds.feature_names = std::move(names);
  ds.features.resize(rows, static_cast<Eigen::Index>(ds.feature_names.size()));
  for (Eigen::Index s = 0; s < rows; ++s)
    for (Eigen::Index f = 0; f < ds.features.cols(); ++f)
      ds.features(s, f) = values[static_cast<std::size_t>(s * ds.features.cols() + f)];
  ds.labels = Eigen::VectorXi::Constant(rows, -1);
  return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path,
                     const std::string& label_column = "label") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
  auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  for (const auto& n : ds.feature_names) out << quoted(n) << ',';
  out << quoted(label_column) << '\n';
  for (Eigen::Index s = 0; s < ds.num_samples(); ++s) {
    for (Eigen::Index f = 0; f < ds.num_features(); ++f)
      out << detail::format_double(ds.features(s, f)) << ',';
    out << ds.labels[s] << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for '" + path + "'");
}

namespace detail {

inline Dataset take_rows(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.num_features());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
    out.labels[static_cast<Eigen::Index>(i)] = ds.labels[rows[i]];
  }
  return out;
}

}  // namespace detail

// Deterministic train/test split. Stratified mode splits each class
// separately so per-class proportions are preserved within one sample.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction,
                                                    std::uint64_t seed, bool stratified = true) {
  ds.validate();
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw std::invalid_argument("train_test_split: fraction must be in (0,1)");

  const Eigen::Index S = ds.num_samples();
  Rng rng(seed);
  std::vector<Eigen::Index> train_rows, test_rows;

  auto split_group = [&](std::vector<Eigen::Index>& group) {
    rng.shuffle(group);
    auto n_train = static_cast<Eigen::Index>(
        std::llround(train_fraction * static_cast<double>(group.size())));
    for (std::size_t i = 0; i < group.size(); ++i)
      (static_cast<Eigen::Index>(i) < n_train ? train_rows : test_rows).push_back(group[i]);
  };

  if (stratified) {
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index s = 0; s < S; ++s) (ds.labels[s] == 1 ? pos : neg).push_back(s);
    split_group(neg);
    split_group(pos);
  } else {
    std::vector<Eigen::Index> all(S);
    std::iota(all.begin(), all.end(), 0);
    split_group(all);
  }
  if (train_rows.empty() || test_rows.empty())
    throw std::invalid_argument("train_test_split: fraction yields an empty partition");

  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {detail::take_rows(ds, train_rows), detail::take_rows(ds, test_rows)};
}

// Two-class Gaussian generator. Class centers sit at +-(class_sep/2) on every
// informative axis; the remaining features are random linear combinations of
// the informative ones plus unit noise. Minority class carries label +1.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const Eigen::Index S = spec.n_samples;
  const Eigen::Index F = spec.n_features;
  const Eigen::Index I = spec.n_informative;
  const auto n_minority = static_cast<Eigen::Index>(
      std::floor(spec.minority_fraction * static_cast<double>(S)));

  // mixing matrix for the dependent features, one draw per dataset
  Eigen::MatrixXd mix(I, F - I);
  const double scale = 1.0 / std::sqrt(static_cast<double>(I));
  for (Eigen::Index j = 0; j < F - I; ++j)
    for (Eigen::Index i = 0; i < I; ++i) mix(i, j) = scale * rng.normal();

  Dataset ds;
  ds.features.resize(S, F);
  ds.labels.resize(S);
  const double half_sep = 0.5 * spec.class_sep;
  for (Eigen::Index s = 0; s < S; ++s) {
    const bool minority = s < n_minority;
    const double center = minority ? half_sep : -half_sep;
    for (Eigen::Index i = 0; i < I; ++i) ds.features(s, i) = center + rng.normal();
    if (F > I) {
      Eigen::RowVectorXd combo = ds.features.row(s).head(I) * mix;
      for (Eigen::Index j = 0; j < F - I; ++j)
        ds.features(s, I + j) = combo[j] + rng.normal();
    }
    ds.labels[s] = minority ? +1 : -1;
  }

  // shuffle rows so class blocks are interleaved
  std::vector<Eigen::Index> order(S);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  Dataset shuffled;
  shuffled.features.resize(S, F);
  shuffled.labels.resize(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    shuffled.features.row(s) = ds.features.row(order[s]);
    shuffled.labels[s] = ds.labels[order[s]];
  }

  const auto n_flip = static_cast<Eigen::Index>(
      std::floor(spec.flip_fraction * static_cast<double>(S)));
  if (n_flip > 0) {
    std::vector<Eigen::Index> idx(S);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (Eigen::Index k = 0; k < n_flip; ++k) shuffled.labels[idx[k]] *= -1;
  }

  shuffled.feature_names.reserve(F);
  for (Eigen::Index f = 0; f < F; ++f) shuffled.feature_names.push_back("f" + std::to_string(f));
  return shuffled;
}

// Population-variance standardization. Constant columns pass through
// unchanged and are recorded as mean 0 / std 1.
inline std::pair<Dataset, ScalerParams> standardize(const Dataset& ds) {
  ds.validate();
  const Eigen::Index S = ds.num_samples();
  const Eigen::Index F = ds.num_features();
  ScalerParams p;
  p.means.resize(F);
  p.std_devs.resize(F);
  Dataset out = ds;
  for (Eigen::Index f = 0; f < F; ++f) {
    const double mean = ds.features.col(f).mean();
    const double var = (ds.features.col(f).array() - mean).square().sum() / static_cast<double>(S);
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      p.means[f] = 0.0;
      p.std_devs[f] = 1.0;
    } else {
      p.means[f] = mean;
      p.std_devs[f] = sd;
      out.features.col(f) = (ds.features.col(f).array() - mean) / sd;
    }
  }
  return {std::move(out), std::move(p)};
}

inline Dataset apply_scaler(const Dataset& ds, const ScalerParams& p) {
  if (static_cast<Eigen::Index>(p.means.size()) != ds.num_features() ||
      p.means.size() != p.std_devs.size())
    throw std::invalid_argument("apply_scaler: parameter length does not match feature count");
  Dataset out = ds;
  for (Eigen::Index f = 0; f < ds.num_features(); ++f) {
    if (!(p.std_devs[static_cast<std::size_t>(f)] > 0.0))
      throw std::invalid_argument("apply_scaler: non-positive std_dev");
    out.features.col(f) =
        (ds.features.col(f).array() - p.means[static_cast<std::size_t>(f)]) /
        p.std_devs[static_cast<std::size_t>(f)];
  }
  if (!out.features.allFinite())
    throw std::invalid_argument("apply_scaler: non-finite value produced");
  return out;
}

}  // namespace cvqboost
