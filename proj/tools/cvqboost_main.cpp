// cvqboost command line: synthetic data generation, training, prediction,
// evaluation, standalone Hamiltonian solving, benchmark sweeps and model
// inspection. Machine-readable results go to --out files; stdout is reserved
// for `inspect` and help text, logs go to stderr.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cvqboost/cvqboost.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

int g_verbose = 0;

void log_line(const std::string& msg) {
  if (g_verbose > 0) std::cerr << "[cvqboost] " << msg << '\n';
}

void apply_thread_env() {
  const char* env = std::getenv("CVQBOOST_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n > 0) {
    cvqboost::set_max_threads(n);
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
    Eigen::setNbThreads(n);
  }
}

std::string derive_path(const std::string& out, const std::string& tag) {
  const auto dot = out.rfind('.');
  if (dot == std::string::npos || out.find('/', dot) != std::string::npos)
    return out + "." + tag;
  return out.substr(0, dot) + "." + tag + out.substr(dot);
}

// ---- shared flag bundles ----------------------------------------------------

struct DataFlags {
  std::string input;
  std::string label_column = "label";
  std::string positive_label = "1";

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "input CSV with a header row")->required();
    cmd->add_option("--label-column", label_column, "name of the label column");
    cmd->add_option("--positive-label", positive_label,
                    "label string mapped to +1; everything else maps to -1");
  }
  cvqboost::Dataset load() const {
    return cvqboost::load_csv(input, label_column, positive_label);
  }
};

struct SyntheticFlags {
  cvqboost::SyntheticSpec spec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--samples", spec.n_samples, "number of samples");
    cmd->add_option("--features", spec.n_features, "number of features");
    cmd->add_option("--informative", spec.n_informative, "number of informative features");
    cmd->add_option("--class-sep", spec.class_sep, "distance between class centers per axis");
    cmd->add_option("--minority-fraction", spec.minority_fraction,
                    "fraction of minority samples before label flips");
    cmd->add_option("--flip-fraction", spec.flip_fraction, "fraction of labels flipped");
  }
};

struct BalanceFlags {
  std::string strategy = "none";
  double ratio = 0.5;
  int k_neighbors = 5;
  CLI::Option* strategy_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;
  CLI::Option* k_opt = nullptr;

  void attach(CLI::App* cmd) {
    strategy_opt = cmd->add_option("--balance", strategy, "balancing strategy")
                       ->check(CLI::IsMember({"none", "downsample", "smote", "adasyn"}));
    ratio_opt = cmd->add_option("--ratio", ratio, "target minority/majority ratio");
    k_opt = cmd->add_option("--k-neighbors", k_neighbors, "neighbor count for SMOTE/ADASYN");
  }
};

struct PoolFlags {
  bool pairs = true;
  int max_weak = 1000;
  int weak_iters = 100;
  double weak_tol = 1e-6;
  CLI::Option* pairs_opt = nullptr;
  CLI::Option* max_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* tol_opt = nullptr;

  void attach(CLI::App* cmd) {
    pairs_opt = cmd->add_flag("--pairs,!--no-pairs", pairs, "include two-feature classifiers");
    max_opt = cmd->add_option("--max-weak", max_weak, "cap on the weak classifier pool");
    iters_opt = cmd->add_option("--weak-iters", weak_iters, "Newton iteration cap per fit");
    tol_opt = cmd->add_option("--weak-tol", weak_tol, "gradient tolerance per fit");
  }
};

struct SolverFlags {
  std::string backend = "dissipative";
  int max_iters = 5000;
  double tol = 1e-8;
  int restarts = 10;
  double emulate_db = 0.0;
  int grid_resolution = 60;
  CLI::Option* backend_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* restarts_opt = nullptr;
  CLI::Option* emulate_opt = nullptr;
  CLI::Option* grid_opt = nullptr;

  void attach(CLI::App* cmd) {
    backend_opt =
        cmd->add_option("--backend", backend, "solver backend")
            ->check(CLI::IsMember(
                {"dissipative", "projected_gradient", "frank_wolfe", "brute_force"}));
    iters_opt = cmd->add_option("--max-iters", max_iters, "iteration cap");
    tol_opt = cmd->add_option("--tol", tol, "relative energy tolerance");
    restarts_opt = cmd->add_option("--restarts", restarts, "independent restarts");
    emulate_opt = cmd->add_option("--emulate-db", emulate_db,
                                  "clamp the Hamiltonian to this dynamic range before solving");
    grid_opt = cmd->add_option("--grid-resolution", grid_resolution,
                               "lattice resolution for brute_force");
  }
};

// ---- config file (JSON mirror of TrainConfig) -------------------------------

cvqboost::TrainConfig train_config_from_json(const nlohmann::json& j) {
  cvqboost::TrainConfig cfg;
  if (j.contains("balance") && !j.at("balance").is_null()) {
    const auto& b = j.at("balance");
    cvqboost::BalanceConfig bal;
    bal.strategy = cvqboost::balance_strategy_from_string(b.value("strategy", "smote"));
    bal.target_ratio = b.value("target_ratio", bal.target_ratio);
    bal.k_neighbors = b.value("k_neighbors", bal.k_neighbors);
    bal.seed = b.value("seed", bal.seed);
    cfg.balance = bal;
  }
  if (j.contains("pool")) {
    const auto& p = j.at("pool");
    cfg.pool.include_pairs = p.value("include_pairs", cfg.pool.include_pairs);
    cfg.pool.max_classifiers = p.value("max_classifiers", cfg.pool.max_classifiers);
    cfg.pool.logistic_max_iters = p.value("logistic_max_iters", cfg.pool.logistic_max_iters);
    cfg.pool.logistic_tolerance = p.value("logistic_tolerance", cfg.pool.logistic_tolerance);
    cfg.pool.seed = p.value("seed", cfg.pool.seed);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.solver.backend = cvqboost::backend_from_string(s.value("backend", "dissipative"));
    cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
    cfg.solver.tolerance = s.value("tolerance", cfg.solver.tolerance);
    cfg.solver.restarts = s.value("restarts", cfg.solver.restarts);
    cfg.solver.seed = s.value("seed", cfg.solver.seed);
    cfg.solver.grid_resolution = s.value("grid_resolution", cfg.solver.grid_resolution);
    if (s.contains("emulate_range_db") && !s.at("emulate_range_db").is_null())
      cfg.solver.emulate_range_db = s.at("emulate_range_db").get<double>();
  }
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.sum_constraint = j.value("sum_constraint", cfg.sum_constraint);
  if (j.contains("threshold_rule"))
    cfg.threshold_rule =
        cvqboost::threshold_rule_from_string(j.at("threshold_rule").get<std::string>());
  return cfg;
}

// ---- subcommand state --------------------------------------------------------

struct GenerateCmd {
  SyntheticFlags data;
  std::uint64_t seed = 0;
  std::string out;
  std::string label_column = "label";
  double train_fraction = 0.0;
  bool stratify = true;
  CLI::Option* fraction_opt = nullptr;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    cmd->add_option("--seed", seed, "generator seed");
    cmd->add_option("--out", out, "output CSV path")->required();
    cmd->add_option("--label-column", label_column, "label column name in the output");
    fraction_opt = cmd->add_option("--train-fraction", train_fraction,
                                   "when set, write <out>.train/.test splits instead");
    cmd->add_flag("--stratify,!--no-stratify", stratify, "stratify the split by class");
  }

  int run() {
    data.spec.seed = seed;
    cvqboost::Dataset ds = cvqboost::generate_synthetic(data.spec);
    if (fraction_opt->count() > 0) {
      auto [train_ds, test_ds] = cvqboost::train_test_split(ds, train_fraction, seed, stratify);
      const std::string train_path = derive_path(out, "train");
      const std::string test_path = derive_path(out, "test");
      cvqboost::save_csv(train_ds, train_path, label_column);
      cvqboost::save_csv(test_ds, test_path, label_column);
      log_line("wrote " + train_path + " (" + std::to_string(train_ds.num_samples()) +
               " rows) and " + test_path + " (" + std::to_string(test_ds.num_samples()) +
               " rows)");
    } else {
      cvqboost::save_csv(ds, out, label_column);
      log_line("wrote " + out + " (" + std::to_string(ds.num_samples()) + " rows)");
    }
    return 0;
  }
};

struct TrainCmd {
  DataFlags data;
  BalanceFlags balance;
  PoolFlags pool;
  SolverFlags solver;
  std::vector<double> lambdas;
  double val_fraction = 0.25;
  std::string threshold_rule = "zero";
  double sum_constraint = 1.0;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* rule_opt = nullptr;
  CLI::Option* sum_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    balance.attach(cmd);
    pool.attach(cmd);
    solver.attach(cmd);
    lambda_opt = cmd->add_option("--lambda", lambdas,
                                 "ridge strength; several values trigger a validation sweep")
                     ->delimiter(',');
    cmd->add_option("--val-fraction", val_fraction, "validation share for the lambda sweep");
    rule_opt = cmd->add_option("--threshold-rule", threshold_rule, "decision threshold rule")
                   ->check(CLI::IsMember({"zero", "balanced_accuracy"}));
    sum_opt = cmd->add_option("--sum-constraint", sum_constraint, "weight budget R");
    seed_opt = cmd->add_option("--seed", seed, "seed for balancing, pool and solver");
    cmd->add_option("--config", config_path, "JSON config file (flags take precedence)");
    cmd->add_option("--out", out, "output model path")->required();
  }

  cvqboost::TrainConfig build_config() const {
    cvqboost::TrainConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
      cfg = train_config_from_json(nlohmann::json::parse(in));
    }
    // explicit flags override the config file
    if (balance.strategy_opt->count() > 0) {
      if (balance.strategy == "none") {
        cfg.balance.reset();
      } else {
        cvqboost::BalanceConfig bal = cfg.balance.value_or(cvqboost::BalanceConfig{});
        bal.strategy = cvqboost::balance_strategy_from_string(balance.strategy);
        cfg.balance = bal;
      }
    }
    if (cfg.balance) {
      if (balance.ratio_opt->count() > 0) cfg.balance->target_ratio = balance.ratio;
      if (balance.k_opt->count() > 0) cfg.balance->k_neighbors = balance.k_neighbors;
    }
    if (pool.pairs_opt->count() > 0) cfg.pool.include_pairs = pool.pairs;
    if (pool.max_opt->count() > 0) cfg.pool.max_classifiers = pool.max_weak;
    if (pool.iters_opt->count() > 0) cfg.pool.logistic_max_iters = pool.weak_iters;
    if (pool.tol_opt->count() > 0) cfg.pool.logistic_tolerance = pool.weak_tol;
    if (solver.backend_opt->count() > 0)
      cfg.solver.backend = cvqboost::backend_from_string(solver.backend);
    if (solver.iters_opt->count() > 0) cfg.solver.max_iters = solver.max_iters;
    if (solver.tol_opt->count() > 0) cfg.solver.tolerance = solver.tol;
    if (solver.restarts_opt->count() > 0) cfg.solver.restarts = solver.restarts;
    if (solver.emulate_opt->count() > 0) cfg.solver.emulate_range_db = solver.emulate_db;
    if (solver.grid_opt->count() > 0) cfg.solver.grid_resolution = solver.grid_resolution;
    if (rule_opt->count() > 0)
      cfg.threshold_rule = cvqboost::threshold_rule_from_string(threshold_rule);
    if (sum_opt->count() > 0) cfg.sum_constraint = sum_constraint;
    if (seed_opt->count() > 0 || config_path.empty()) {
      cfg.pool.seed = seed;
      cfg.solver.seed = seed;
      if (cfg.balance) cfg.balance->seed = seed;
    }
    return cfg;
  }

  int run() {
    cvqboost::Dataset ds = data.load();
    cvqboost::TrainConfig cfg = build_config();
    if (lambda_opt->count() > 0 && lambdas.size() == 1) cfg.lambda = lambdas[0];

    if (lambdas.size() > 1) {
      log_line("sweeping lambda over " + std::to_string(lambdas.size()) + " values");
      auto tuned = cvqboost::tune_lambda(ds, cfg, lambdas, val_fraction, seed);
      for (const auto& e : tuned.entries)
        log_line("lambda " + std::to_string(e.lambda) + ": validation AUC " +
                 std::to_string(e.validation_auc));
      cfg.lambda = tuned.best_lambda;
      log_line("selected lambda " + std::to_string(cfg.lambda));
    }

    cvqboost::Model model = cvqboost::train(ds, cfg);
    cvqboost::save_model(model, out);
    log_line("trained on " + std::to_string(ds.num_samples()) + " rows; energy " +
             std::to_string(model.metadata.energy) + "; wrote " + out);
    return 0;
  }
};

struct PredictCmd {
  std::string model_path;
  std::string input;
  std::string label_column = "label";
  std::string output;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_path, "trained model JSON")->required();
    cmd->add_option("--input", input, "input CSV")->required();
    cmd->add_option("--label-column", label_column, "label column to ignore, when present");
    cmd->add_option("--output,--out", output, "output CSV with scores and predictions")
        ->required();
  }

  int run() {
    cvqboost::Model model = cvqboost::load_model(model_path);
    cvqboost::Dataset ds = cvqboost::load_csv_features(input, label_column);
    Eigen::VectorXd scores = cvqboost::decision_scores(model, ds);
    std::ofstream outf(output, std::ios::binary);
    if (!outf) throw std::runtime_error("cannot open '" + output + "' for writing");
    outf << "score,prediction\n";
    for (Eigen::Index s = 0; s < scores.size(); ++s)
      outf << cvqboost::detail::format_double(scores[s]) << ','
           << (scores[s] > model.threshold ? 1 : -1) << '\n';
    log_line("wrote " + std::to_string(scores.size()) + " predictions to " + output);
    return 0;
  }
};

struct EvaluateCmd {
  DataFlags data;
  std::string model_path;
  std::string metric = "auc";
  std::string out;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    cmd->add_option("--model", model_path, "trained model JSON")->required();
    cmd->add_option("--metric", metric, "metric to compute")
        ->check(CLI::IsMember({"auc", "accuracy", "balanced_accuracy"}));
    cmd->add_option("--out", out, "output JSON path")->required();
  }

  int run() {
    cvqboost::Model model = cvqboost::load_model(model_path);
    cvqboost::Dataset ds = data.load();
    double value = 0.0;
    if (metric == "auc") {
      value = cvqboost::auc(cvqboost::decision_scores(model, ds), ds.labels);
    } else if (metric == "accuracy") {
      value = cvqboost::accuracy(cvqboost::predict(model, ds), ds.labels);
    } else {
      value = cvqboost::balanced_accuracy(cvqboost::predict(model, ds), ds.labels);
    }
    nlohmann::json result{{"metric", metric}, {"value", value}, {"samples", ds.num_samples()}};
    std::ofstream outf(out, std::ios::binary);
    if (!outf) throw std::runtime_error("cannot open '" + out + "' for writing");
    outf << result.dump(2) << '\n';
    log_line(metric + " = " + std::to_string(value));
    return 0;
  }
};

struct SolveCmd {
  SolverFlags solver;
  std::string input;
  std::uint64_t seed = 1;
  std::string out;
  std::string trace_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "Hamiltonian JSON")->required();
    solver.attach(cmd);
    cmd->add_option("--seed", seed, "restart seed");
    cmd->add_option("--out", out, "output solution JSON")->required();
    cmd->add_option("--trace", trace_path, "optional CSV of (iteration, energy)");
  }

  int run() {
    cvqboost::SolverConfig cfg;
    cfg.backend = cvqboost::backend_from_string(solver.backend);
    cfg.max_iters = solver.max_iters;
    cfg.tolerance = solver.tol;
    cfg.restarts = solver.restarts;
    cfg.seed = seed;
    cfg.grid_resolution = solver.grid_resolution;
    if (solver.emulate_opt->count() > 0) cfg.emulate_range_db = solver.emulate_db;

    cvqboost::Solution sol = cvqboost::solve_file(input, cfg);
    nlohmann::json result{
        {"weights",
         std::vector<double>(sol.weights.data(), sol.weights.data() + sol.weights.size())},
        {"energy", sol.energy},
        {"boost_loss", sol.boost_loss},
        {"iterations", sol.iterations},
        {"converged", sol.converged},
        {"backend", solver.backend}};
    std::ofstream outf(out, std::ios::binary);
    if (!outf) throw std::runtime_error("cannot open '" + out + "' for writing");
    outf << result.dump(2) << '\n';

    if (!trace_path.empty()) {
      std::ofstream tr(trace_path, std::ios::binary);
      if (!tr) throw std::runtime_error("cannot open '" + trace_path + "' for writing");
      tr << "iteration,energy\n";
      for (const auto& [iter, e] : sol.trace)
        tr << iter << ',' << cvqboost::detail::format_double(e) << '\n';
    }
    log_line("energy " + std::to_string(sol.energy) + " after " +
             std::to_string(sol.iterations) + " iterations");
    return 0;
  }
};

struct BenchCmd {
  SyntheticFlags data;
  BalanceFlags balance;
  PoolFlags pool;
  SolverFlags solver;
  std::string axis = "train-count";
  std::vector<double> values;
  int repeats = 5;
  double lambda = 1.0;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;

  void attach(CLI::App* cmd) {
    cmd->add_option("--axis", axis, "sweep axis")
        ->check(CLI::IsMember({"train-count", "feature-count", "class-ratio", "hamiltonian-size"}))
        ->required();
    cmd->add_option("--values", values, "axis values, comma separated")
        ->delimiter(',')
        ->required();
    cmd->add_option("--repeats", repeats, "trials per value");
    data.attach(cmd);
    balance.attach(cmd);
    pool.attach(cmd);
    solver.attach(cmd);
    cmd->add_option("--lambda", lambda, "ridge strength");
    cmd->add_option("--train-fraction", train_fraction, "train share per trial");
    cmd->add_option("--seed", seed, "base seed; trial seeds are seed + trial index");
    cmd->add_option("--out", out, "report path (.csv or .json)")->required();
    cmd->add_option("--format", format, "override the format implied by the extension")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  int run() {
    cvqboost::SweepSpec spec;
    spec.axis = cvqboost::sweep_axis_from_string(axis);
    spec.values = values;
    spec.repeats = repeats;
    spec.data = data.spec;
    spec.train_fraction = train_fraction;
    spec.seed = seed;
    spec.train.lambda = lambda;
    spec.train.pool.include_pairs = pool.pairs;
    spec.train.pool.max_classifiers = pool.max_weak;
    spec.train.pool.logistic_max_iters = pool.weak_iters;
    spec.train.pool.logistic_tolerance = pool.weak_tol;
    if (balance.strategy_opt->count() > 0 && balance.strategy != "none") {
      cvqboost::BalanceConfig bal;
      bal.strategy = cvqboost::balance_strategy_from_string(balance.strategy);
      bal.target_ratio = balance.ratio;
      bal.k_neighbors = balance.k_neighbors;
      spec.train.balance = bal;
    }
    cvqboost::SolverConfig scfg;
    scfg.backend = cvqboost::backend_from_string(solver.backend);
    scfg.max_iters = solver.max_iters;
    scfg.tolerance = solver.tol;
    scfg.restarts = solver.restarts;
    scfg.grid_resolution = solver.grid_resolution;
    if (solver.emulate_opt->count() > 0) scfg.emulate_range_db = solver.emulate_db;
    spec.train.solver = scfg;
    spec.solver = scfg;

    cvqboost::Report report = cvqboost::run_sweep(spec);
    std::string fmt = format;
    if (fmt.empty())
      fmt = (out.size() >= 5 && out.substr(out.size() - 5) == ".json") ? "json" : "csv";
    cvqboost::emit(report, fmt, out);
    log_line("wrote " + out);
    return 0;
  }
};

struct InspectCmd {
  std::string model_path;
  int top = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_path, "trained model JSON")->required();
    cmd->add_option("--top", top, "show only the k heaviest classifiers");
  }

  int run() {
    cvqboost::Model model = cvqboost::load_model(model_path);
    std::vector<std::size_t> order(model.pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double wa = model.weights[static_cast<Eigen::Index>(a)];
      const double wb = model.weights[static_cast<Eigen::Index>(b)];
      if (wa != wb) return wa > wb;
      return a < b;
    });
    std::size_t rows = order.size();
    if (top > 0) rows = std::min<std::size_t>(rows, static_cast<std::size_t>(top));

    std::cout << std::left << std::setw(6) << "rank" << std::setw(14) << "weight"
              << std::setw(24) << "features" << std::setw(30) << "coefficients" << std::setw(14)
              << "intercept" << "train_auc\n";
    double shown = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& wc = model.pool[order[r]];
      const double w = model.weights[static_cast<Eigen::Index>(order[r])];
      shown += w;
      std::string feats, coefs;
      for (std::size_t j = 0; j < wc.feature_indices.size(); ++j) {
        if (j) {
          feats += ",";
          coefs += ",";
        }
        feats += "f" + std::to_string(wc.feature_indices[j]);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", wc.coefficients[j]);
        coefs += buf;
      }
      std::ostringstream line;
      line << std::left << std::setw(6) << (r + 1) << std::setw(14) << std::setprecision(6)
           << w << std::setw(24) << feats << std::setw(30) << coefs << std::setw(14)
           << std::setprecision(5) << wc.intercept << std::setprecision(5) << wc.train_auc;
      std::cout << line.str() << '\n';
    }
    std::cout << "displayed weight " << std::setprecision(9) << shown << " of "
              << model.sum_constraint << " across " << rows << " of " << model.pool.size()
              << " classifiers\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"CVQBoost: boosting with simplex-constrained quadratic weight optimization"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbose, "log progress to stderr");

  auto subcommand = [&](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->fallthrough();  // global flags like --verbose may follow the subcommand
    return cmd;
  };
  GenerateCmd generate;
  generate.attach(subcommand("generate", "write a synthetic two-class CSV dataset"));
  TrainCmd train;
  train.attach(subcommand("train", "train a model from a labeled CSV"));
  PredictCmd predict;
  predict.attach(subcommand("predict", "score a CSV with a trained model"));
  EvaluateCmd evaluate;
  evaluate.attach(subcommand("evaluate", "compute a metric on labeled data"));
  SolveCmd solve;
  solve.attach(subcommand("solve", "minimize a Hamiltonian JSON over the simplex"));
  BenchCmd bench;
  bench.attach(subcommand("bench", "run a runtime/accuracy sweep and emit a report"));
  InspectCmd inspect;
  inspect.attach(subcommand("inspect", "print classifiers ordered by weight"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("generate")) return generate.run();
    if (app.got_subcommand("train")) return train.run();
    if (app.got_subcommand("predict")) return predict.run();
    if (app.got_subcommand("evaluate")) return evaluate.run();
    if (app.got_subcommand("solve")) return solve.run();
    if (app.got_subcommand("bench")) return bench.run();
    if (app.got_subcommand("inspect")) return inspect.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
