#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqboost/common.hpp"
#include "cvqboost/model.hpp"

namespace cvqboost {

enum class SweepAxis { train_count, feature_count, class_ratio, hamiltonian_size };

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::train_count: return "train_count";
    case SweepAxis::feature_count: return "feature_count";
    case SweepAxis::class_ratio: return "class_ratio";
    case SweepAxis::hamiltonian_size: return "hamiltonian_size";
  }
  return "?";
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "train_count" || s == "train-count") return SweepAxis::train_count;
  if (s == "feature_count" || s == "feature-count") return SweepAxis::feature_count;
  if (s == "class_ratio" || s == "class-ratio") return SweepAxis::class_ratio;
  if (s == "hamiltonian_size" || s == "hamiltonian-size") return SweepAxis::hamiltonian_size;
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

// Desk-scale caps: sweeps refuse sample counts beyond 500k and Hamiltonian
// sizes beyond 1000.
struct SweepSpec {
  SweepAxis axis = SweepAxis::train_count;
  std::vector<double> values;
  int repeats = 5;
  TrainConfig train;
  SolverConfig solver;       // hamiltonian_size axis
  SyntheticSpec data;        // base dataset recipe
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::uint64_t seed_stride = 1;  // 0 forces identical seeds across trials

  void validate() const {
    if (values.size() < 1) throw std::invalid_argument("sweep: no axis values");
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      if (!(values[i] < values[i + 1]))
        throw std::invalid_argument("sweep: values must be strictly increasing");
    for (double v : values) {
      if (!(v > 0.0)) throw std::invalid_argument("sweep: values must be positive");
      if (axis == SweepAxis::train_count && v > 500000.0)
        throw std::invalid_argument("sweep: train_count capped at 500000");
      if (axis == SweepAxis::hamiltonian_size && v > 1000.0)
        throw std::invalid_argument("sweep: hamiltonian_size capped at 1000");
      if (axis == SweepAxis::class_ratio && v > 1.0)
        throw std::invalid_argument("sweep: class_ratio values must be in (0, 1]");
    }
    if (repeats < 3) throw std::invalid_argument("sweep: repeats must be >= 3");
    if (axis == SweepAxis::class_ratio && !train.balance)
      throw std::invalid_argument("sweep: class_ratio axis needs a balance config");
    train.validate();
    solver.validate();
  }
};

struct ReportRow {
  double value = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_runtime_s = std::numeric_limits<double>::quiet_NaN();
  double std_runtime_s = std::numeric_limits<double>::quiet_NaN();
  double mean_auc = std::numeric_limits<double>::quiet_NaN();
  double std_auc = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, double>> phase_seconds;
};

struct ReportEnvironment {
  int cores = 0;
  int threads = 0;
  std::string timestamp;
};

struct Report {
  std::string axis;
  std::string strategy;  // balancing strategy, when the sweep used one
  ReportEnvironment environment;
  std::vector<ReportRow> rows;
};

namespace detail {

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty())
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

struct TrialOutcome {
  double runtime_s = 0.0;
  double auc = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, double>> phase_seconds;
};

inline std::uint64_t trial_seed(const SweepSpec& spec, int trial) {
  return spec.seed + spec.seed_stride * static_cast<std::uint64_t>(trial);
}

inline TrainConfig seeded_train_config(const SweepSpec& spec, std::uint64_t seed) {
  TrainConfig cfg = spec.train;
  cfg.pool.seed = seed;
  cfg.solver.seed = seed;
  if (cfg.balance) cfg.balance->seed = seed;
  return cfg;
}

// one full train/evaluate cycle on synthetic data
inline TrialOutcome run_train_trial(const SweepSpec& spec, double value, int trial) {
  const std::uint64_t seed = trial_seed(spec, trial);
  SyntheticSpec data = spec.data;
  data.seed = seed;
  if (spec.axis == SweepAxis::train_count) {
    data.n_samples = static_cast<Eigen::Index>(value);
  } else if (spec.axis == SweepAxis::feature_count) {
    data.n_features = static_cast<Eigen::Index>(value);
    data.n_informative = std::min(data.n_informative, data.n_features);
  }
  Dataset ds = generate_synthetic(data);
  auto [train_ds, test_ds] = train_test_split(ds, spec.train_fraction, seed, true);

  TrainConfig cfg = seeded_train_config(spec, seed);
  if (spec.axis == SweepAxis::class_ratio) {
    cfg.balance->target_ratio = value;
    // a target at or below the natural ratio degrades to no balancing
    if (value <= class_ratio(train_ds)) cfg.balance.reset();
  }

  Model m = train(train_ds, cfg);
  TrialOutcome out;
  out.runtime_s = m.metadata.total_seconds;
  out.phase_seconds = m.metadata.phase_seconds;
  out.auc = auc(decision_scores(m, test_ds), test_ds.labels);
  return out;
}

// builds a Hamiltonian of the requested size through the pipeline, then times
// the solve on its own
inline TrialOutcome run_solver_trial(const SweepSpec& spec, double value, int trial) {
  const std::uint64_t seed = trial_seed(spec, trial);
  const auto n = static_cast<int>(value);

  // smallest F whose singles + pairs reach the requested pool size
  Eigen::Index F = 1;
  while (F + F * (F - 1) / 2 < n) ++F;

  SyntheticSpec data = spec.data;
  data.seed = seed;
  data.n_features = std::max(data.n_features, F);
  data.n_informative = std::min(data.n_informative, data.n_features);

  StopWatch pipeline;
  Dataset ds = generate_synthetic(data);
  auto [scaled, scaler] = standardize(ds);
  PoolConfig pool_cfg = spec.train.pool;
  pool_cfg.include_pairs = true;
  pool_cfg.max_classifiers = n;
  pool_cfg.seed = seed;
  auto pool = build_pool(scaled, pool_cfg);
  Eigen::MatrixXd H = predict_matrix(pool, scaled);
  Hamiltonian ham = assemble(H, scaled.labels, spec.train.lambda, spec.train.sum_constraint);
  const double build_s = pipeline.seconds();

  SolverConfig solver_cfg = spec.solver;
  solver_cfg.seed = seed;
  StopWatch sw;
  Solution sol = solve(ham, solver_cfg);
  (void)sol;
  const double solve_s = sw.seconds();

  TrialOutcome out;
  out.runtime_s = solve_s;
  out.phase_seconds = {{"pipeline", build_s}, {"solve", solve_s}};
  return out;
}

}  // namespace detail

// Runs `repeats` trials per axis value, sequentially so timings stay clean.
// Trial failures are counted per row and do not abort the sweep.
inline Report run_sweep(const SweepSpec& spec) {
  spec.validate();
  Report report;
  report.axis = to_string(spec.axis);
  if (spec.train.balance) report.strategy = to_string(spec.train.balance->strategy);
  report.environment.cores = effective_threads();
  report.environment.threads = effective_threads();
  report.environment.timestamp = detail::utc_timestamp();

  for (double value : spec.values) {
    ReportRow row;
    row.value = value;
    std::vector<double> runtimes, aucs;
    std::map<std::string, std::vector<double>> phases;
    for (int trial = 0; trial < spec.repeats; ++trial) {
      try {
        detail::TrialOutcome out =
            spec.axis == SweepAxis::hamiltonian_size
                ? detail::run_solver_trial(spec, value, trial)
                : detail::run_train_trial(spec, value, trial);
        runtimes.push_back(out.runtime_s);
        if (std::isfinite(out.auc)) aucs.push_back(out.auc);
        for (const auto& [name, secs] : out.phase_seconds) phases[name].push_back(secs);
      } catch (const std::exception& e) {
        ++row.failures;
        std::cerr << "bench: trial " << trial << " at value " << value << " failed: " << e.what()
                  << '\n';
      }
    }
    row.trials = static_cast<int>(runtimes.size());
    std::tie(row.mean_runtime_s, row.std_runtime_s) = detail::mean_std(runtimes);
    std::tie(row.mean_auc, row.std_auc) = detail::mean_std(aucs);
    for (const auto& [name, xs] : phases)
      row.phase_seconds.emplace_back(name, detail::mean_std(xs).first);
    report.rows.push_back(std::move(row));
  }
  return report;
}

// Least-squares slope of log(mean runtime) against log(axis value).
inline double fit_scaling_exponent(const Report& report) {
  std::vector<double> lx, ly;
  for (const auto& row : report.rows) {
    if (row.trials == 0) continue;
    if (!(row.value > 0.0) || !(row.mean_runtime_s > 0.0))
      throw std::invalid_argument("fit_scaling_exponent: values and runtimes must be positive");
    lx.push_back(std::log(row.value));
    ly.push_back(std::log(row.mean_runtime_s));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("fit_scaling_exponent: need at least 3 usable rows");
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0.0) throw std::invalid_argument("fit_scaling_exponent: degenerate axis");
  return num / den;
}

// ---- emit / parse ---------------------------------------------------------
//
// CSV column order (fixed): value, trials, failures, mean_runtime_s,
// std_runtime_s, runtime_err95_s, mean_auc, std_auc, auc_err95, phases.
// The err95 columns are the paper-style 2-sigma error bars, derived from the
// std columns. Leading '#' lines carry the environment capture.

namespace detail {

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

inline double csv_parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v;
  if (!parse_double(s, v)) throw std::runtime_error("report: bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline void emit_csv(const Report& report, std::ostream& out) {
  out << "# cvqboost bench report v1\n";
  out << "# axis=" << report.axis << '\n';
  if (!report.strategy.empty()) out << "# strategy=" << report.strategy << '\n';
  out << "# cores=" << report.environment.cores << '\n';
  out << "# threads=" << report.environment.threads << '\n';
  out << "# timestamp=" << report.environment.timestamp << '\n';
  out << "value,trials,failures,mean_runtime_s,std_runtime_s,runtime_err95_s,"
         "mean_auc,std_auc,auc_err95,phases\n";
  for (const auto& r : report.rows) {
    out << detail::csv_double(r.value) << ',' << r.trials << ',' << r.failures << ','
        << detail::csv_double(r.mean_runtime_s) << ',' << detail::csv_double(r.std_runtime_s)
        << ',' << detail::csv_double(2.0 * r.std_runtime_s) << ','
        << detail::csv_double(r.mean_auc) << ',' << detail::csv_double(r.std_auc) << ','
        << detail::csv_double(2.0 * r.std_auc) << ',';
    for (std::size_t i = 0; i < r.phase_seconds.size(); ++i) {
      if (i) out << ';';
      out << r.phase_seconds[i].first << '=' << detail::csv_double(r.phase_seconds[i].second);
    }
    out << '\n';
  }
}

inline nlohmann::json report_to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json phases = nlohmann::json::object();
    for (const auto& [name, secs] : r.phase_seconds) phases[name] = secs;
    rows.push_back({{"value", r.value},
                    {"trials", r.trials},
                    {"failures", r.failures},
                    {"mean_runtime_s", r.mean_runtime_s},
                    {"std_runtime_s", r.std_runtime_s},
                    {"runtime_err95_s", 2.0 * r.std_runtime_s},
                    {"mean_auc", r.mean_auc},
                    {"std_auc", r.std_auc},
                    {"auc_err95", 2.0 * r.std_auc},
                    {"phases", phases}});
  }
  return nlohmann::json{{"format_version", 1},
                        {"axis", report.axis},
                        {"strategy", report.strategy},
                        {"environment",
                         {{"cores", report.environment.cores},
                          {"threads", report.environment.threads},
                          {"timestamp", report.environment.timestamp}}},
                        {"rows", rows}};
}

inline void emit(const Report& report, const std::string& format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open '" + path + "'");
  if (format == "csv") {
    emit_csv(report, out);
  } else if (format == "json") {
    out << report_to_json(report).dump(2) << '\n';
  } else {
    throw std::invalid_argument("emit: format must be csv or json");
  }
  if (!out) throw std::runtime_error("emit: write failed for '" + path + "'");
}

inline Report parse_report_csv(std::istream& in) {
  Report report;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "axis") report.axis = val;
      else if (key == "strategy") report.strategy = val;
      else if (key == "cores") report.environment.cores = std::stoi(val);
      else if (key == "threads") report.environment.threads = std::stoi(val);
      else if (key == "timestamp") report.environment.timestamp = val;
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 9) throw std::runtime_error("report: short CSV row '" + line + "'");
    ReportRow r;
    r.value = detail::csv_parse_double(cells[0]);
    r.trials = std::stoi(cells[1]);
    r.failures = std::stoi(cells[2]);
    r.mean_runtime_s = detail::csv_parse_double(cells[3]);
    r.std_runtime_s = detail::csv_parse_double(cells[4]);
    r.mean_auc = detail::csv_parse_double(cells[6]);
    r.std_auc = detail::csv_parse_double(cells[7]);
    if (cells.size() >= 10 && !cells[9].empty()) {
      std::stringstream ps(cells[9]);
      std::string item;
      while (std::getline(ps, item, ';')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("report: bad phase cell '" + item + "'");
        r.phase_seconds.emplace_back(item.substr(0, eq),
                                     detail::csv_parse_double(item.substr(eq + 1)));
      }
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

inline Report parse_report_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error("report: unsupported format_version");
  Report report;
  report.axis = j.at("axis").get<std::string>();
  report.strategy = j.value("strategy", "");
  report.environment.cores = j.at("environment").at("cores").get<int>();
  report.environment.threads = j.at("environment").at("threads").get<int>();
  report.environment.timestamp = j.at("environment").at("timestamp").get<std::string>();
  auto num = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  for (const auto& jr : j.at("rows")) {
    ReportRow r;
    r.value = num(jr.at("value"));
    r.trials = jr.at("trials").get<int>();
    r.failures = jr.at("failures").get<int>();
    r.mean_runtime_s = num(jr.at("mean_runtime_s"));
    r.std_runtime_s = num(jr.at("std_runtime_s"));
    r.mean_auc = num(jr.at("mean_auc"));
    r.std_auc = num(jr.at("std_auc"));
    for (const auto& [name, secs] : jr.at("phases").items())
      r.phase_seconds.emplace_back(name, num(secs));
    report.rows.push_back(std::move(r));
  }
  return report;
}

inline Report parse_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_report: cannot open '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return parse_report_json(nlohmann::json::parse(in));
  return parse_report_csv(in);
}

// NaN-tolerant equality used by the round-trip checks.
inline bool report_equal(const Report& a, const Report& b) {
  auto feq = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  if (a.axis != b.axis || a.strategy != b.strategy || a.rows.size() != b.rows.size())
    return false;
  if (a.environment.cores != b.environment.cores ||
      a.environment.threads != b.environment.threads ||
      a.environment.timestamp != b.environment.timestamp)
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (!feq(ra.value, rb.value) || ra.trials != rb.trials || ra.failures != rb.failures ||
        !feq(ra.mean_runtime_s, rb.mean_runtime_s) || !feq(ra.std_runtime_s, rb.std_runtime_s) ||
        !feq(ra.mean_auc, rb.mean_auc) || !feq(ra.std_auc, rb.std_auc))
      return false;
    auto pa = ra.phase_seconds;
    auto pb = rb.phase_seconds;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    if (pa.size() != pb.size()) return false;
    for (std::size_t k = 0; k < pa.size(); ++k)
      if (pa[k].first != pb[k].first || !feq(pa[k].second, pb[k].second)) return false;
  }
  return true;
}

}  // namespace cvqboost
