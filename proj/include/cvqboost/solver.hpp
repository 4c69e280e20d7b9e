#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvqboost/common.hpp"
#include "cvqboost/hamiltonian.hpp"

namespace cvqboost {

enum class SolverBackend { dissipative, projected_gradient, frank_wolfe, brute_force };

inline std::string to_string(SolverBackend b) {
  switch (b) {
    case SolverBackend::dissipative: return "dissipative";
    case SolverBackend::projected_gradient: return "projected_gradient";
    case SolverBackend::frank_wolfe: return "frank_wolfe";
    case SolverBackend::brute_force: return "brute_force";
  }
  return "?";
}

inline SolverBackend backend_from_string(const std::string& s) {
  if (s == "dissipative") return SolverBackend::dissipative;
  if (s == "projected_gradient") return SolverBackend::projected_gradient;
  if (s == "frank_wolfe") return SolverBackend::frank_wolfe;
  if (s == "brute_force") return SolverBackend::brute_force;
  throw std::invalid_argument("unknown solver backend '" + s + "'");
}

struct SolverConfig {
  SolverBackend backend = SolverBackend::dissipative;
  int max_iters = 5000;
  double tolerance = 1e-8;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::optional<double> emulate_range_db;
  int grid_resolution = 60;  // brute_force only

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
    if (restarts < 1) throw std::invalid_argument("solver: restarts must be >= 1");
    if (grid_resolution < 1) throw std::invalid_argument("solver: grid_resolution must be >= 1");
    if (emulate_range_db && !(*emulate_range_db > 0.0))
      throw std::invalid_argument("solver: emulate_range_db must be positive");
  }
};

struct Solution {
  Eigen::VectorXd weights;
  double energy = 0.0;
  double boost_loss = 0.0;
  long iterations = 0;
  std::vector<std::pair<int, double>> trace;
  bool converged = false;
};

// Euclidean projection onto {w >= 0, sum w = R} by the sorted-threshold rule:
// w_i = max(v_i - tau, 0) with tau such that the sum constraint holds.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double R) {
  if (v.size() < 1) throw std::invalid_argument("project_simplex: empty vector");
  if (!(R > 0.0)) throw std::invalid_argument("project_simplex: R must be positive");
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double prefix = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    prefix += u[static_cast<std::size_t>(k)];
    const double t = (prefix - R) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0);
}

namespace detail {

// Converged when the energy change across the last 10 accepted steps is
// relatively small.
class ConvergenceWindow {
 public:
  explicit ConvergenceWindow(double tol) : tol_(tol) {}

  bool push(double e) {
    ring_[head_ % ring_.size()] = e;
    ++head_;
    if (head_ < ring_.size() + 1) return false;
    const double oldest = ring_[head_ % ring_.size()];
    return std::abs(oldest - e) < tol_ * (1.0 + std::abs(e));
  }

 private:
  double tol_;
  std::array<double, 11> ring_{};
  std::size_t head_ = 0;
};

struct RunResult {
  Eigen::VectorXd weights;
  double energy = std::numeric_limits<double>::infinity();
  long iterations = 0;
  std::vector<std::pair<int, double>> trace;
  bool converged = false;
};

inline Eigen::VectorXd dirichlet_point(Rng& rng, Eigen::Index n, double R) {
  Eigen::VectorXd w(n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform();
    w[i] = -std::log1p(-u);
    sum += w[i];
  }
  if (!(sum > 0.0)) return Eigen::VectorXd::Constant(n, R / static_cast<double>(n));
  return w * (R / sum);
}

// Multiplicative-weights / replicator iteration: w <- w .* exp(-eta * grad),
// renormalized to the sum constraint. Steps that would raise the energy are
// rejected and eta halved, which keeps the trace non-increasing.
inline RunResult run_dissipative(const Hamiltonian& ham, Eigen::VectorXd w,
                                 const SolverConfig& cfg) {
  const double R = ham.sum_constraint;
  RunResult res;
  ConvergenceWindow window(cfg.tolerance);

  Eigen::VectorXd jw = ham.apply(w);
  double e = w.dot(jw) + ham.C.dot(w);
  Eigen::VectorXd grad = 2.0 * jw + ham.C;
  if (!std::isfinite(e)) return res;

  double eta = 1.0 / (grad.lpNorm<Eigen::Infinity>() + 1e-12);
  res.trace.emplace_back(0, e);
  window.push(e);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iterations = iter;
    Eigen::VectorXd cand =
        w.array() * (-eta * grad.array()).min(40.0).max(-40.0).exp();
    const double s = cand.sum();
    if (!std::isfinite(s) || s <= 0.0) {
      eta *= 0.5;
      continue;
    }
    cand *= R / s;
    // components this far gone cannot recover within double range; flushing
    // them keeps the mat-vec clear of denormal stalls
    cand = (cand.array() < 1e-250 * R).select(0.0, cand);
    Eigen::VectorXd jc = ham.apply(cand);
    const double ec = cand.dot(jc) + ham.C.dot(cand);
    if (!std::isfinite(ec) || ec > e) {
      eta *= 0.5;
      continue;
    }
    w = std::move(cand);
    jw = std::move(jc);
    e = ec;
    grad = 2.0 * jw + ham.C;
    res.trace.emplace_back(iter, e);
    if (window.push(e)) {
      res.converged = true;
      break;
    }
  }
  res.weights = std::move(w);
  res.energy = e;
  return res;
}

// Projected gradient with Armijo backtracking on the step size; monotone.
inline RunResult run_projected_gradient(const Hamiltonian& ham, Eigen::VectorXd w,
                                        const SolverConfig& cfg) {
  const double R = ham.sum_constraint;
  RunResult res;
  ConvergenceWindow window(cfg.tolerance);

  w = project_simplex(w, R);
  Eigen::VectorXd jw = ham.apply(w);
  double e = w.dot(jw) + ham.C.dot(w);
  if (!std::isfinite(e)) return res;

  const double lipschitz = 2.0 * ham.J.cwiseAbs().rowwise().sum().maxCoeff();
  double t = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  res.trace.emplace_back(0, e);
  window.push(e);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iterations = iter;
    Eigen::VectorXd grad = 2.0 * jw + ham.C;
    bool accepted = false;
    while (t > 1e-18) {
      Eigen::VectorXd cand = project_simplex(w - t * grad, R);
      Eigen::VectorXd jc = ham.apply(cand);
      const double ec = cand.dot(jc) + ham.C.dot(cand);
      const double decrease = grad.dot(w - cand);
      if (std::isfinite(ec) && ec <= e - 1e-4 * decrease && ec <= e) {
        if ((cand - w).lpNorm<Eigen::Infinity>() == 0.0) break;  // fixed point
        w = std::move(cand);
        jw = std::move(jc);
        e = ec;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {  // stationary: the gradient mapping is (numerically) zero
      res.converged = true;
      break;
    }
    t *= 2.0;
    res.trace.emplace_back(iter, e);
    if (window.push(e)) {
      res.converged = true;
      break;
    }
  }
  res.weights = std::move(w);
  res.energy = e;
  return res;
}

// Frank-Wolfe with an exact line search along the vertex direction. J*w is
// maintained incrementally, so one iteration reads a single column of J.
inline RunResult run_frank_wolfe(const Hamiltonian& ham, Eigen::VectorXd w,
                                 const SolverConfig& cfg) {
  const double R = ham.sum_constraint;
  RunResult res;
  ConvergenceWindow window(cfg.tolerance);

  w = project_simplex(w, R);
  Eigen::VectorXd jw = ham.apply(w);
  double e = w.dot(jw) + ham.C.dot(w);
  if (!std::isfinite(e)) return res;
  res.trace.emplace_back(0, e);
  window.push(e);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iterations = iter;
    Eigen::VectorXd grad = 2.0 * jw + ham.C;
    Eigen::Index k = 0;
    grad.minCoeff(&k);
    Eigen::VectorXd dir = -w;
    dir[k] += R;
    const double slope = grad.dot(dir);  // <= 0 by choice of vertex
    if (slope >= -cfg.tolerance * (1.0 + std::abs(e)) * 1e-3 && iter > 1) {
      res.converged = true;  // Frank-Wolfe gap exhausted
      break;
    }
    Eigen::VectorXd jd = R * ham.J.col(k) - jw;
    const double curvature = dir.dot(jd);
    double gamma = 1.0;
    if (curvature > 0.0) gamma = std::clamp(-slope / (2.0 * curvature), 0.0, 1.0);
    if (gamma == 0.0) {
      res.converged = true;
      break;
    }
    w += gamma * dir;
    jw += gamma * jd;
    e = w.dot(jw) + ham.C.dot(w);
    res.trace.emplace_back(iter, e);
    if (window.push(e)) {
      res.converged = true;
      break;
    }
  }
  res.weights = std::move(w);
  res.energy = e;
  return res;
}

// Exhaustive evaluation of the scaled lattice {R/d * c : c composition of d
// into N parts}. Exact oracle for small N; errors when the lattice explodes.
inline RunResult run_brute_force(const Hamiltonian& ham, const SolverConfig& cfg) {
  const Eigen::Index n = ham.size();
  const int d = cfg.grid_resolution;
  constexpr double kMaxPoints = 2e7;

  double count = 1.0;  // C(d + n - 1, n - 1)
  for (Eigen::Index i = 1; i < n; ++i) count *= static_cast<double>(d + i) / static_cast<double>(i);
  if (count > kMaxPoints)
    throw std::invalid_argument("brute_force: composition count " + std::to_string(count) +
                                " exceeds the safety cap");

  const double step = ham.sum_constraint / static_cast<double>(d);
  RunResult res;
  res.converged = true;

  std::vector<int> comp(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd w(n);
  long visited = 0;

  // odometer over compositions: comp holds counts for the first n-1 slots,
  // the last slot absorbs the remainder
  std::function<void(Eigen::Index, int)> recurse = [&](Eigen::Index pos, int left) {
    if (pos == n - 1) {
      comp[static_cast<std::size_t>(pos)] = left;
      for (Eigen::Index i = 0; i < n; ++i) w[i] = step * comp[static_cast<std::size_t>(i)];
      const double e = w.dot(ham.apply(w)) + ham.C.dot(w);
      ++visited;
      if (e < res.energy) {
        res.energy = e;
        res.weights = w;
        res.trace.emplace_back(static_cast<int>(visited), e);
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      comp[static_cast<std::size_t>(pos)] = c;
      recurse(pos + 1, left - c);
    }
  };
  recurse(0, d);
  res.iterations = visited;
  return res;
}

}  // namespace detail

// Minimizes the Hamiltonian over the scaled simplex. The best of `restarts`
// independent Dirichlet(1) starts wins, ties resolved by restart index; the
// returned weights are re-projected so feasibility holds exactly.
inline Solution solve(const Hamiltonian& ham, const SolverConfig& cfg) {
  cfg.validate();
  ham.validate();
  const Hamiltonian work =
      cfg.emulate_range_db ? quantize_to_range(ham, *cfg.emulate_range_db) : ham;
  const double R = work.sum_constraint;
  const Eigen::Index n = work.size();

  std::vector<detail::RunResult> runs;
  if (cfg.backend == SolverBackend::brute_force) {
    runs.push_back(detail::run_brute_force(work, cfg));
  } else {
    runs.resize(static_cast<std::size_t>(cfg.restarts));
    const Rng parent(cfg.seed);
    const int n_threads = std::min(effective_threads(), cfg.restarts);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (int r = 0; r < cfg.restarts; ++r) {
      try {
        Rng rng = parent.child(static_cast<std::uint64_t>(r));
        Eigen::VectorXd w0 = detail::dirichlet_point(rng, n, R);
        auto& slot = runs[static_cast<std::size_t>(r)];
        switch (cfg.backend) {
          case SolverBackend::dissipative:
            slot = detail::run_dissipative(work, std::move(w0), cfg);
            break;
          case SolverBackend::projected_gradient:
            slot = detail::run_projected_gradient(work, std::move(w0), cfg);
            break;
          case SolverBackend::frank_wolfe:
            slot = detail::run_frank_wolfe(work, std::move(w0), cfg);
            break;
          default:
            break;
        }
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }

  std::size_t best = runs.size();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (!std::isfinite(runs[r].energy)) continue;
    if (best == runs.size() || runs[r].energy < runs[best].energy) best = r;
  }
  if (best == runs.size())
    throw std::runtime_error("solve: all restarts diverged to non-finite energy");

  detail::RunResult& winner = runs[best];
  Eigen::VectorXd w = project_simplex(winner.weights, R);
  const double sum = w.sum();
  if (sum > 0.0) w *= R / sum;

  Solution sol;
  sol.weights = std::move(w);
  sol.energy = energy(work, sol.weights);
  sol.boost_loss = sol.energy + work.offset;
  sol.iterations = winner.iterations;
  sol.trace = std::move(winner.trace);
  sol.converged = winner.converged;
  return sol;
}

inline Solution solve_file(const std::string& path, const SolverConfig& cfg) {
  return solve(load_hamiltonian(path), cfg);
}

}  // namespace cvqboost
