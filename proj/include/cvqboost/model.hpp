#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvqboost/balancing.hpp"
#include "cvqboost/common.hpp"
#include "cvqboost/dataset.hpp"
#include "cvqboost/hamiltonian.hpp"
#include "cvqboost/metrics.hpp"
#include "cvqboost/solver.hpp"
#include "cvqboost/weak.hpp"

namespace cvqboost {

enum class ThresholdRule { zero, balanced_accuracy };

inline std::string to_string(ThresholdRule r) {
  return r == ThresholdRule::zero ? "zero" : "balanced_accuracy";
}

inline ThresholdRule threshold_rule_from_string(const std::string& s) {
  if (s == "zero") return ThresholdRule::zero;
  if (s == "balanced_accuracy") return ThresholdRule::balanced_accuracy;
  throw std::invalid_argument("unknown threshold rule '" + s + "'");
}

struct TrainConfig {
  std::optional<BalanceConfig> balance;
  PoolConfig pool;
  double lambda = 1.0;
  SolverConfig solver;
  ThresholdRule threshold_rule = ThresholdRule::zero;
  double sum_constraint = 1.0;

  void validate() const {
    if (balance) balance->validate();
    pool.validate();
    solver.validate();
    if (lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
    if (!(sum_constraint > 0.0))
      throw std::invalid_argument("train: sum_constraint must be positive");
  }
};

struct ModelMetadata {
  std::vector<std::pair<std::string, double>> phase_seconds;
  double total_seconds = 0.0;
  double energy = 0.0;
  double boost_loss = 0.0;
  long solver_iterations = 0;
  bool solver_converged = false;
  std::uint64_t pool_seed = 0;
  std::uint64_t solver_seed = 0;
};

struct Model {
  std::vector<WeakClassifier> pool;
  Eigen::VectorXd weights;
  ScalerParams scaler;
  double threshold = 0.0;
  double lambda = 1.0;
  double sum_constraint = 1.0;
  ModelMetadata metadata;

  void validate() const {
    if (pool.empty()) throw std::invalid_argument("model: empty pool");
    if (static_cast<Eigen::Index>(pool.size()) != weights.size())
      throw std::invalid_argument("model: pool/weight size mismatch");
    if ((weights.array() < 0.0).any())
      throw std::invalid_argument("model: negative weight");
    if (std::abs(weights.sum() - sum_constraint) > 1e-9 * sum_constraint)
      throw std::invalid_argument("model: weights do not sum to the constraint level");
  }
};

namespace detail {

// Threshold maximizing (TPR+TNR)/2 over all decision boundaries of the given
// scores; prediction rule is `score > threshold`. Ties keep the highest
// threshold.
inline double best_balanced_accuracy_threshold(const Eigen::VectorXd& scores,
                                               const Eigen::VectorXi& labels) {
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

  double n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) (labels[i] == 1 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("threshold selection requires both classes");

  double best_threshold = scores[order[0]];  // everything predicted -1
  double best_ba = 0.5;
  double tp = 0, fp = 0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (Eigen::Index k = i; k <= j; ++k) (labels[order[k]] == 1 ? tp : fp) += 1.0;
    // boundary below this score group: group and everything above become +1
    const double group_score = scores[order[i]];
    const double next_score = (j + 1 < n) ? scores[order[j + 1]] : group_score - 2.0;
    const double threshold = 0.5 * (group_score + next_score);
    const double ba = 0.5 * (tp / n_pos + (n_neg - fp) / n_neg);
    if (ba > best_ba) {
      best_ba = ba;
      best_threshold = threshold;
    }
    i = j + 1;
  }
  return best_threshold;
}

}  // namespace detail

// Full training pipeline: standardize, optional balancing, pool construction,
// Hamiltonian assembly and simplex solve, then threshold selection. Phase
// wall times land in the model metadata.
inline Model train(const Dataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  ds.validate();
  if (ds.count_label(+1) == 0 || ds.count_label(-1) == 0)
    throw std::invalid_argument("train: both classes must be present");

  StopWatch total;
  Model m;
  auto& phases = m.metadata.phase_seconds;

  StopWatch sw;
  auto [scaled, scaler] = standardize(ds);
  m.scaler = std::move(scaler);
  phases.emplace_back("standardize", sw.seconds());

  sw.reset();
  Dataset working = cfg.balance ? balance(scaled, *cfg.balance) : std::move(scaled);
  if (working.count_label(+1) == 0 || working.count_label(-1) == 0)
    throw std::runtime_error("train: single class after balancing");
  phases.emplace_back("balance", sw.seconds());

  sw.reset();
  m.pool = build_pool(working, cfg.pool);
  phases.emplace_back("pool_fit", sw.seconds());

  sw.reset();
  Eigen::MatrixXd H = predict_matrix(m.pool, working);
  phases.emplace_back("predict_matrix", sw.seconds());

  sw.reset();
  Hamiltonian ham = assemble(H, working.labels, cfg.lambda, cfg.sum_constraint);
  phases.emplace_back("assemble", sw.seconds());

  sw.reset();
  Solution sol = solve(ham, cfg.solver);
  phases.emplace_back("solve", sw.seconds());

  sw.reset();
  m.weights = sol.weights;
  m.lambda = cfg.lambda;
  m.sum_constraint = cfg.sum_constraint;
  if (cfg.threshold_rule == ThresholdRule::balanced_accuracy) {
    Eigen::VectorXd scores = H * m.weights;
    m.threshold = detail::best_balanced_accuracy_threshold(scores, working.labels);
  } else {
    m.threshold = 0.0;
  }
  phases.emplace_back("threshold", sw.seconds());

  m.metadata.energy = sol.energy;
  m.metadata.boost_loss = sol.boost_loss;
  m.metadata.solver_iterations = sol.iterations;
  m.metadata.solver_converged = sol.converged;
  m.metadata.pool_seed = cfg.pool.seed;
  m.metadata.solver_seed = cfg.solver.seed;
  m.metadata.total_seconds = total.seconds();
  m.validate();
  return m;
}

// Weighted weak-classifier scores on new data; rows are scaled with the
// training scaler first. Scores live in [-R, R].
inline Eigen::VectorXd decision_scores(const Model& m, const Dataset& ds) {
  m.validate();
  if (ds.num_features() != static_cast<Eigen::Index>(m.scaler.means.size()))
    throw std::invalid_argument("decision_scores: feature count differs from training");
  Dataset scaled = apply_scaler(ds, m.scaler);
  return predict_matrix(m.pool, scaled) * m.weights;
}

inline Eigen::VectorXi predict(const Model& m, const Dataset& ds) {
  Eigen::VectorXd scores = decision_scores(m, ds);
  Eigen::VectorXi labels(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    labels[i] = scores[i] > m.threshold ? +1 : -1;
  return labels;
}

// ---- persistence ----------------------------------------------------------

inline nlohmann::json model_to_json(const Model& m) {
  m.validate();
  nlohmann::json pool = nlohmann::json::array();
  for (const auto& wc : m.pool)
    pool.push_back({{"features", wc.feature_indices},
                    {"coefficients", wc.coefficients},
                    {"intercept", wc.intercept},
                    {"train_auc", wc.train_auc},
                    {"converged", wc.converged}});
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [name, secs] : m.metadata.phase_seconds) phases[name] = secs;
  return nlohmann::json{
      {"format_version", 1},
      {"lambda", m.lambda},
      {"sum_constraint", m.sum_constraint},
      {"threshold", m.threshold},
      {"weights", std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size())},
      {"scaler", {{"means", m.scaler.means}, {"std_devs", m.scaler.std_devs}}},
      {"pool", pool},
      {"metadata",
       {{"phases", phases},
        {"total_seconds", m.metadata.total_seconds},
        {"energy", m.metadata.energy},
        {"boost_loss", m.metadata.boost_loss},
        {"solver_iterations", m.metadata.solver_iterations},
        {"solver_converged", m.metadata.solver_converged},
        {"pool_seed", m.metadata.pool_seed},
        {"solver_seed", m.metadata.solver_seed}}}};
}

inline Model model_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version"))
    throw std::runtime_error("model: missing format_version");
  if (!j.at("format_version").is_number_integer() || j.at("format_version").get<int>() != 1)
    throw std::runtime_error("model: unsupported format_version " + j.at("format_version").dump());
  for (const char* key : {"lambda", "sum_constraint", "threshold", "weights", "scaler", "pool"})
    if (!j.contains(key)) throw std::runtime_error(std::string("model: missing field '") + key + "'");

  Model m;
  m.lambda = j.at("lambda").get<double>();
  m.sum_constraint = j.at("sum_constraint").get<double>();
  m.threshold = j.at("threshold").get<double>();
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  m.scaler.means = j.at("scaler").at("means").get<std::vector<double>>();
  m.scaler.std_devs = j.at("scaler").at("std_devs").get<std::vector<double>>();
  for (const auto& jc : j.at("pool")) {
    WeakClassifier wc;
    wc.feature_indices = jc.at("features").get<std::vector<int>>();
    wc.coefficients = jc.at("coefficients").get<std::vector<double>>();
    wc.intercept = jc.at("intercept").get<double>();
    wc.train_auc = jc.at("train_auc").get<double>();
    wc.converged = jc.value("converged", true);
    m.pool.push_back(std::move(wc));
  }
  if (j.contains("metadata")) {
    const auto& md = j.at("metadata");
    m.metadata.total_seconds = md.value("total_seconds", 0.0);
    m.metadata.energy = md.value("energy", 0.0);
    m.metadata.boost_loss = md.value("boost_loss", 0.0);
    m.metadata.solver_iterations = md.value("solver_iterations", 0L);
    m.metadata.solver_converged = md.value("solver_converged", false);
    m.metadata.pool_seed = md.value("pool_seed", std::uint64_t{0});
    m.metadata.solver_seed = md.value("solver_seed", std::uint64_t{0});
    if (md.contains("phases"))
      for (const auto& [name, secs] : md.at("phases").items())
        m.metadata.phase_seconds.emplace_back(name, secs.get<double>());
  }
  m.validate();
  return m;
}

inline void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_model: write failed for '" + path + "'");
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_model: '" + path + "': " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error("load_model: '" + path + "': " + e.what());
  }
}

// ---- lambda sweep ---------------------------------------------------------

struct LambdaTuneEntry {
  double lambda = 0.0;
  double validation_auc = 0.0;
};

struct LambdaTuneResult {
  double best_lambda = 0.0;
  std::vector<LambdaTuneEntry> entries;
};

// Trains once per candidate lambda on an internal split and scores each on
// the held-back part. Highest validation AUC wins; ties prefer stronger
// regularization.
inline LambdaTuneResult tune_lambda(const Dataset& ds, const TrainConfig& base,
                                    const std::vector<double>& lambdas,
                                    double validation_fraction = 0.25,
                                    std::uint64_t seed = 0) {
  if (lambdas.empty()) throw std::invalid_argument("tune_lambda: no candidates");
  auto [fit, val] = train_test_split(ds, 1.0 - validation_fraction, seed, true);
  LambdaTuneResult result;
  for (double l : lambdas) {
    TrainConfig cfg = base;
    cfg.lambda = l;
    Model m = train(fit, cfg);
    const double score = auc(decision_scores(m, val), val.labels);
    result.entries.push_back({l, score});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    const auto& cur = result.entries[i];
    const auto& champ = result.entries[best];
    if (cur.validation_auc > champ.validation_auc ||
        (cur.validation_auc == champ.validation_auc && cur.lambda > champ.lambda))
      best = i;
  }
  result.best_lambda = result.entries[best].lambda;
  return result;
}

}  // namespace cvqboost
