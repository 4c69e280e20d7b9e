// Acceptance suite: end-to-end guarantees of the library, one PASS/FAIL line
// per criterion. Exits with the number of failed criteria.

#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "cvqboost/cvqboost.hpp"
#include "test_helpers.hpp"

using namespace cvqboost;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      detail << "      failed: " << msg << '\n';
    }
  }
  void note(const std::string& msg) { detail << "      " << msg << '\n'; }
};

SyntheticSpec criterion5_data(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_samples = 20000;
  spec.n_features = 20;
  spec.n_informative = 10;
  spec.class_sep = 1.5;
  spec.minority_fraction = 0.05;
  spec.flip_fraction = 0.01;
  spec.seed = seed;
  return spec;
}

TrainConfig criterion5_config(std::uint64_t seed) {
  TrainConfig cfg;
  BalanceConfig bal;
  bal.strategy = BalanceStrategy::smote;
  bal.target_ratio = 0.5;
  bal.k_neighbors = 5;
  bal.seed = seed;
  cfg.balance = bal;
  cfg.pool.include_pairs = true;
  cfg.pool.max_classifiers = 200;
  cfg.pool.seed = seed;
  cfg.solver.max_iters = 3000;
  cfg.solver.restarts = 6;
  cfg.solver.seed = seed;
  return cfg;
}

// ---- criteria ---------------------------------------------------------------

Check objective_identity() {
  Check c;
  StopWatch sw;
  Rng rng(101);
  const double lambdas[] = {0.0, 1.0, 10.0};
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.index(200));
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.index(50));
    const double lambda = lambdas[t % 3];
    Eigen::MatrixXd h = test_helpers::random_predictions(rng, s, n);
    Eigen::VectorXi y = test_helpers::random_labels(rng, s);
    Hamiltonian ham = assemble(h, y, lambda);
    for (int p = 0; p < 50; ++p) {
      Eigen::VectorXd w = test_helpers::random_simplex_point(rng, n, 1.0);
      const double loss = boost_loss(h, y, lambda, w);
      const double via_energy = energy(ham, w) + ham.offset;
      c.require(std::abs(via_energy - loss) <= 1e-10 * (1.0 + std::abs(loss)),
                "identity violated at instance " + std::to_string(t));
      if (!c.ok) return c;
    }
  }
  const double elapsed = sw.seconds();
  c.note("100 instances x 50 points in " + std::to_string(elapsed) + "s");
  c.require(elapsed < 5.0, "runtime exceeded 5 s");
  return c;
}

Check solver_oracle_optimality() {
  Check c;
  StopWatch sw;
  Rng rng(202);
  const SolverBackend backends[] = {SolverBackend::dissipative,
                                    SolverBackend::projected_gradient,
                                    SolverBackend::frank_wolfe, SolverBackend::brute_force};
  double worst_gap = -1e300;
  for (int t = 0; t < 100; ++t) {
    Hamiltonian ham = test_helpers::random_hamiltonian(rng, 3, -2.0, 2.0);
    SolverConfig bf;
    bf.backend = SolverBackend::brute_force;
    bf.grid_resolution = 60;
    const double grid_min = solve(ham, bf).energy;
    for (SolverBackend backend : backends) {
      SolverConfig cfg;
      cfg.backend = backend;
      cfg.max_iters = 20000;
      cfg.tolerance = 1e-12;
      cfg.restarts = 10;
      cfg.seed = 1000 + static_cast<std::uint64_t>(t);
      cfg.grid_resolution = 60;
      const Solution sol = solve(ham, cfg);
      worst_gap = std::max(worst_gap, sol.energy - grid_min);
      c.require(sol.energy <= grid_min + 1e-3,
                to_string(backend) + " missed the grid minimum by " +
                    std::to_string(sol.energy - grid_min) + " at instance " + std::to_string(t));
    }
  }
  const double elapsed = sw.seconds();
  c.note("worst energy gap vs d=60 grid: " + std::to_string(worst_gap) + " (" +
         std::to_string(elapsed) + "s)");
  c.require(elapsed < 60.0, "runtime exceeded 60 s");
  return c;
}

Check feasibility_and_monotonicity() {
  Check c;
  Rng rng(303);
  const double levels[] = {0.5, 1.0, 2.5};
  for (int t = 0; t < 1000 && c.ok; ++t) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.index(8));
    const double R = levels[t % 3];
    Hamiltonian ham = test_helpers::random_hamiltonian(rng, n, -2.0, 2.0, R);
    const SolverBackend backend =
        (t % 3 == 0) ? SolverBackend::dissipative
                     : (t % 3 == 1) ? SolverBackend::projected_gradient
                                    : SolverBackend::frank_wolfe;
    SolverConfig cfg;
    cfg.backend = backend;
    cfg.max_iters = 250;
    cfg.restarts = 2;
    cfg.seed = static_cast<std::uint64_t>(t);
    const Solution sol = solve(ham, cfg);
    c.require(sol.weights.minCoeff() >= 0.0, "negative weight at instance " + std::to_string(t));
    c.require(std::abs(sol.weights.sum() - R) <= 1e-9 * R,
              "sum constraint violated at instance " + std::to_string(t));
    if (backend != SolverBackend::dissipative) {
      for (std::size_t i = 1; i < sol.trace.size(); ++i)
        c.require(sol.trace[i].second <= sol.trace[i - 1].second + 1e-12,
                  "non-monotone trace at instance " + std::to_string(t));
    }
  }
  c.note("1000 instances across all iterative backends");
  return c;
}

Check auc_oracle() {
  Check c;
  Rng rng(404);
  for (int t = 0; t < 1000 && c.ok; ++t) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.index(200));
    Eigen::VectorXd scores(n);
    Eigen::VectorXi labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      scores[i] = (t % 2) ? std::floor(rng.uniform(-3.0, 3.0)) : rng.uniform(-3.0, 3.0);
      labels[i] = rng.uniform() < 0.5 ? 1 : -1;
    }
    labels[0] = 1;
    labels[1] = -1;

    double hits = 0.0;
    long pairs = 0;
    for (Eigen::Index p = 0; p < n; ++p) {
      if (labels[p] != 1) continue;
      for (Eigen::Index q = 0; q < n; ++q) {
        if (labels[q] != -1) continue;
        ++pairs;
        if (scores[p] > scores[q]) hits += 1.0;
        else if (scores[p] == scores[q]) hits += 0.5;
      }
    }
    const double brute = hits / static_cast<double>(pairs);
    c.require(std::abs(auc(scores, labels) - brute) <= 1e-12,
              "rank AUC deviates from pair counting at set " + std::to_string(t));
  }
  c.note("1000 score/label sets, ties included");
  return c;
}

Check end_to_end_accuracy() {
  Check c;
  StopWatch sw;
  const std::uint64_t seed = 2026;
  Dataset ds = generate_synthetic(criterion5_data(seed));
  auto [train_ds, test_ds] = train_test_split(ds, 0.8, seed, true);

  TrainConfig cfg = criterion5_config(seed);
  const LambdaTuneResult tuned = tune_lambda(train_ds, cfg, {0.1, 1.0, 10.0}, 0.25, seed);
  for (const auto& e : tuned.entries)
    c.note("lambda " + std::to_string(e.lambda) + " -> validation AUC " +
           std::to_string(e.validation_auc));
  cfg.lambda = tuned.best_lambda;

  const Model model = train(train_ds, cfg);
  const double heldout = auc(decision_scores(model, test_ds), test_ds.labels);
  const double elapsed = sw.seconds();
  c.note("held-out AUC " + std::to_string(heldout) + " with lambda " +
         std::to_string(cfg.lambda) + " (" + std::to_string(elapsed) + "s)");
  c.require(heldout >= 0.90, "held-out AUC below 0.90");
  c.require(elapsed < 300.0, "runtime exceeded 5 minutes");
  return c;
}

Check balancing_trend() {
  Check c;
  const int n_seeds = 5;

  // ratio 0.01 sits below the natural class ratio of this data, so balancing
  // toward it is a no-op; one baseline run per seed serves every strategy
  std::vector<double> auc_low(n_seeds);
  std::vector<Dataset> trains, tests;
  for (int s = 0; s < n_seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s + 1);
    Dataset ds = generate_synthetic(criterion5_data(seed));
    auto [train_ds, test_ds] = train_test_split(ds, 0.8, seed, true);
    TrainConfig cfg = criterion5_config(seed);
    cfg.balance.reset();
    const Model m = train(train_ds, cfg);
    auc_low[static_cast<std::size_t>(s)] = auc(decision_scores(m, test_ds), test_ds.labels);
    trains.push_back(std::move(train_ds));
    tests.push_back(std::move(test_ds));
  }
  double mean_low = 0.0;
  for (double a : auc_low) mean_low += a / n_seeds;

  for (BalanceStrategy strategy :
       {BalanceStrategy::smote, BalanceStrategy::adasyn, BalanceStrategy::downsample}) {
    double mean_high = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      const auto seed = static_cast<std::uint64_t>(s + 1);
      TrainConfig cfg = criterion5_config(seed);
      cfg.balance->strategy = strategy;
      cfg.balance->target_ratio = 1.0;
      const Model m = train(trains[static_cast<std::size_t>(s)], cfg);
      mean_high +=
          auc(decision_scores(m, tests[static_cast<std::size_t>(s)]),
              tests[static_cast<std::size_t>(s)].labels) /
          n_seeds;
    }
    c.note(to_string(strategy) + ": mean AUC " + std::to_string(mean_high) +
           " at ratio 1.0 vs " + std::to_string(mean_low) + " at ratio 0.01");
    c.require(mean_high >= mean_low,
              to_string(strategy) + " did not improve over the unbalanced baseline");
  }
  return c;
}

Check assembly_scaling() {
  Check c;
  Rng rng(707);
  const Eigen::Index n = 200;
  const std::vector<Eigen::Index> sizes = {10000, 20000, 40000, 80000};

  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::VectorXi> labels;
  for (Eigen::Index s : sizes) {
    inputs.push_back(test_helpers::random_predictions(rng, s, n));
    labels.push_back(test_helpers::random_labels(rng, s));
  }
  // spin up thread team and kernels before timing anything
  (void)assemble(inputs[0].topRows(4096), labels[0].head(4096), 1.0);

  // reps interleaved across sizes so machine-load drift hits all of them;
  // the minimum is the cleanest estimate of the true cost
  std::vector<double> best(sizes.size(), 1e300);
  for (int rep = 0; rep < 5; ++rep)
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      StopWatch sw;
      Hamiltonian ham = assemble(inputs[k], labels[k], 1.0);
      best[k] = std::min(best[k], sw.seconds());
      c.require(ham.offset == double(sizes[k]), "assemble offset mismatch");
    }

  Report report;
  report.axis = "train_count";
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    ReportRow row;
    row.value = double(sizes[k]);
    row.trials = 5;
    row.mean_runtime_s = best[k];
    report.rows.push_back(row);
  }
  const double exponent = fit_scaling_exponent(report);
  c.note("assemble-time exponent in S at N=200: " + std::to_string(exponent));
  c.require(exponent >= 0.8 && exponent <= 1.3, "exponent outside [0.8, 1.3]");
  return c;
}

Check solver_scaling() {
  Check c;
  Rng rng(808);
  const std::vector<Eigen::Index> sizes = {100, 200, 400, 800};
  std::vector<Hamiltonian> instances;
  for (Eigen::Index n : sizes)
    instances.push_back(test_helpers::random_hamiltonian(rng, n, -1.0, 1.0));

  SolverConfig cfg;
  cfg.backend = SolverBackend::dissipative;
  cfg.max_iters = 300;
  cfg.tolerance = 1e-300;  // effectively fixed-iteration
  cfg.restarts = 1;
  cfg.seed = 9;
  (void)solve(instances[0], cfg);  // warmup

  std::vector<double> best(sizes.size(), 1e300);
  for (int rep = 0; rep < 5; ++rep)
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      StopWatch sw;
      Solution sol = solve(instances[k], cfg);
      best[k] = std::min(best[k], sw.seconds() / double(std::max(sol.iterations, 1L)));
    }

  Report report;
  report.axis = "hamiltonian_size";
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    ReportRow row;
    row.value = double(sizes[k]);
    row.trials = 5;
    row.mean_runtime_s = best[k];
    report.rows.push_back(row);
  }
  const double exponent = fit_scaling_exponent(report);
  c.note("dissipative per-iteration exponent in N: " + std::to_string(exponent));
  c.require(exponent >= 1.5 && exponent <= 2.5, "per-iteration exponent outside [1.5, 2.5]");

  // report-only: whole-pipeline growth in N when the pool is grown through
  // the feature count (pool size rises quadratically with F)
  Report pipeline;
  pipeline.axis = "hamiltonian_size";
  for (Eigen::Index F : {14, 20, 28, 40}) {
    SyntheticSpec spec;
    spec.n_samples = 2000;
    spec.n_features = F;
    spec.n_informative = std::min<Eigen::Index>(8, F);
    spec.class_sep = 1.5;
    spec.minority_fraction = 0.3;
    spec.seed = 11 + static_cast<std::uint64_t>(F);
    Dataset ds = generate_synthetic(spec);
    TrainConfig cfg;
    cfg.pool.include_pairs = true;
    cfg.pool.max_classifiers = 1000;
    cfg.solver.max_iters = 300;
    cfg.solver.tolerance = 1e-300;
    cfg.solver.restarts = 1;
    const Model m = train(ds, cfg);
    ReportRow row;
    row.value = double(m.pool.size());
    row.trials = 1;
    row.mean_runtime_s = m.metadata.total_seconds;
    pipeline.rows.push_back(row);
  }
  const double pipeline_exponent = fit_scaling_exponent(pipeline);
  c.note("report only: pipeline-time exponent in N " + std::to_string(pipeline_exponent) +
         " vs quadratic pool growth in F (exponent 2 in F means exponent 1 in N)");
  return c;
}

Check range_emulation() {
  Check c;
  int collected = 0;
  int non_degrading = 0;
  std::uint64_t seed = 40;
  double min_native = 1e300;
  double max_native = 0.0;
  while (collected < 20 && seed < 400) {
    ++seed;
    // weakly separated balanced classes yield near-useless classifiers whose
    // cross-products cancel, which is what stretches the coefficient range
    SyntheticSpec spec;
    spec.n_samples = 2000;
    spec.n_features = 14;
    spec.n_informative = 7;
    spec.class_sep = 0.3;
    spec.minority_fraction = 0.5;
    spec.seed = seed;
    Dataset ds = standardize(generate_synthetic(spec)).first;

    PoolConfig pool_cfg;
    pool_cfg.include_pairs = true;
    pool_cfg.max_classifiers = 105;
    pool_cfg.logistic_max_iters = 40;
    auto pool = build_pool(ds, pool_cfg);
    Hamiltonian ham = assemble(predict_matrix(pool, ds), ds.labels, 1.0);
    if (dynamic_range_db(ham) < 40.0) continue;  // need genuinely wide instances
    ++collected;
    min_native = std::min(min_native, dynamic_range_db(ham));
    max_native = std::max(max_native, dynamic_range_db(ham));

    SolverConfig cfg;
    cfg.max_iters = 4000;
    cfg.restarts = 6;
    cfg.seed = seed;
    const Solution plain = solve(ham, cfg);
    cfg.emulate_range_db = 23.0;
    const Solution emulated = solve(ham, cfg);
    const double emulated_energy = energy(ham, emulated.weights);
    if (emulated_energy >= plain.energy - 1e-9 * (1.0 + std::abs(plain.energy)))
      ++non_degrading;
  }
  std::ostringstream ranges;
  if (collected > 0)
    ranges << " (native " << min_native << ".." << max_native << " dB)";
  c.note(std::to_string(collected) + " instances with native range >= 40 dB" + ranges.str() +
         "; emulation kept energy >= plain on " + std::to_string(non_degrading) + " of them");
  c.require(collected == 20, "could not construct 20 wide-range Hamiltonians");
  c.require(non_degrading >= 18, "emulation energy gap seen on fewer than 90% of instances");
  return c;
}

Check determinism_and_persistence() {
  Check c;
  SyntheticSpec spec;
  spec.n_samples = 4000;
  spec.n_features = 10;
  spec.n_informative = 5;
  spec.class_sep = 1.5;
  spec.minority_fraction = 0.2;
  spec.flip_fraction = 0.01;
  spec.seed = 515;
  Dataset ds = generate_synthetic(spec);

  TrainConfig cfg;
  cfg.pool.include_pairs = true;
  cfg.pool.max_classifiers = 60;
  cfg.solver.max_iters = 2000;
  cfg.solver.restarts = 5;
  cfg.solver.seed = 3;
  BalanceConfig bal;
  bal.strategy = BalanceStrategy::smote;
  bal.target_ratio = 0.6;
  bal.seed = 3;
  cfg.balance = bal;

  const Model a = train(ds, cfg);
  const Model b = train(ds, cfg);
  c.require(a.weights == b.weights, "identical configs produced different weights");

  const std::string path = "/tmp/cvqboost_acceptance_model.json";
  save_model(a, path);
  const Model loaded = load_model(path);
  std::remove(path.c_str());

  SyntheticSpec probe_spec = spec;
  probe_spec.n_samples = 1000;
  probe_spec.seed = 616;
  Dataset probe = generate_synthetic(probe_spec);
  const Eigen::VectorXd before = decision_scores(a, probe);
  const Eigen::VectorXd after = decision_scores(loaded, probe);
  c.require(before == after, "save/load changed at least one score bit");
  c.note("weights identical across trainings; 1000 reloaded scores bit-identical");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "objective identity between the boosting loss and the Hamiltonian", objective_identity},
      {2, "solver backends reach the brute-force grid minimum (N=3)", solver_oracle_optimality},
      {3, "feasibility and monotone traces over 1000 instances", feasibility_and_monotonicity},
      {4, "rank-based AUC equals brute-force pair counting", auc_oracle},
      {5, "end-to-end held-out AUC >= 0.90 at desk scale", end_to_end_accuracy},
      {6, "balancing to ratio 1.0 beats ratio 0.01 for all strategies", balancing_trend},
      {7, "Hamiltonian assembly scales near-linearly in the sample count", assembly_scaling},
      {8, "dissipative per-iteration cost scales as N^2", solver_scaling},
      {9, "23 dB range emulation does not beat the unquantized solve", range_emulation},
      {10, "training determinism and bit-exact persistence", determinism_and_persistence},
  };

  int failures = 0;
  std::cout << "cvqboost acceptance suite\n";
  for (const auto& criterion : criteria) {
    StopWatch sw;
    Check result;
    try {
      result = criterion.body();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "      exception: " << e.what() << '\n';
    }
    std::printf("%s  criterion %2d: %s (%.1fs)\n", result.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, sw.seconds());
    std::cout << result.detail.str();
    if (!result.ok) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures;
}
