#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cvqboost/common.hpp"
#include "cvqboost/dataset.hpp"
#include "cvqboost/metrics.hpp"

namespace cvqboost {

// Logistic model over a 1- or 2-feature subset, scored into [-1, 1].
struct WeakClassifier {
  std::vector<int> feature_indices;   // 1 or 2 distinct column indices
  std::vector<double> coefficients;   // same length as feature_indices
  double intercept = 0.0;
  double train_auc = 0.0;
  bool converged = true;
};

struct PoolConfig {
  bool include_pairs = true;
  int max_classifiers = 1000;
  int logistic_max_iters = 100;
  double logistic_tolerance = 1e-6;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_classifiers < 1) throw std::invalid_argument("pool: max_classifiers must be >= 1");
    if (logistic_max_iters < 1) throw std::invalid_argument("pool: logistic_max_iters must be >= 1");
    if (!(logistic_tolerance > 0.0))
      throw std::invalid_argument("pool: logistic_tolerance must be positive");
  }
};

namespace detail {

inline double softplus(double t) {  // log(1 + exp(t)), overflow-safe
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

constexpr double kLogisticRidge = 1e-4;

}  // namespace detail

// Damped-Newton fit of an L2-regularized logistic regression on the selected
// columns. The ridge (1e-4 on the coefficients, not the intercept) keeps the
// optimum finite on separable subsets. Non-convergence within the iteration
// budget is flagged on the returned classifier, not thrown.
inline WeakClassifier fit_logistic(const Dataset& ds, const std::vector<int>& feature_indices,
                                   int max_iters = 100, double tolerance = 1e-6) {
  if (feature_indices.empty() || feature_indices.size() > 2)
    throw std::invalid_argument("fit_logistic: need 1 or 2 feature indices");
  if (feature_indices.size() == 2 && feature_indices[0] == feature_indices[1])
    throw std::invalid_argument("fit_logistic: feature indices must be distinct");
  for (int f : feature_indices)
    if (f < 0 || f >= ds.num_features())
      throw std::invalid_argument("fit_logistic: feature index out of range");
  const bool has_pos = ds.count_label(+1) > 0;
  const bool has_neg = ds.count_label(-1) > 0;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("fit_logistic: both classes must be present");

  const Eigen::Index S = ds.num_samples();
  const auto d = static_cast<Eigen::Index>(feature_indices.size());

  Eigen::MatrixXd X(S, d);
  for (Eigen::Index j = 0; j < d; ++j)
    X.col(j) = ds.features.col(feature_indices[static_cast<std::size_t>(j)]);
  Eigen::VectorXd y = ds.labels.cast<double>();

  // theta = [intercept, coefficients...]
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  const double ridge = detail::kLogisticRidge;

  auto loss_at = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd z = (X * th.tail(d)).array() + th[0];
    double loss = 0.0;
    for (Eigen::Index s = 0; s < S; ++s) loss += detail::softplus(-y[s] * z[s]);
    return loss + 0.5 * ridge * th.tail(d).squaredNorm();
  };

  double loss = loss_at(theta);
  bool converged = false;
  Eigen::VectorXd grad(d + 1);
  Eigen::MatrixXd hess(d + 1, d + 1);

  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd z = (X * theta.tail(d)).array() + theta[0];
    Eigen::VectorXd p(S), w(S);
    for (Eigen::Index s = 0; s < S; ++s) {
      const double sig = 1.0 / (1.0 + std::exp(-z[s]));
      p[s] = sig;
      w[s] = sig * (1.0 - sig);
    }
    Eigen::VectorXd resid = p - (y.array() + 1.0).matrix() * 0.5;  // p - [y==+1]
    grad[0] = resid.sum();
    grad.tail(d) = X.transpose() * resid + ridge * theta.tail(d);

    if (grad.lpNorm<Eigen::Infinity>() < tolerance) {
      converged = true;
      break;
    }

    hess(0, 0) = w.sum() + 1e-10;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double cross = (w.array() * X.col(j).array()).sum();
      hess(0, j + 1) = cross;
      hess(j + 1, 0) = cross;
      for (Eigen::Index k = j; k < d; ++k) {
        const double v = (w.array() * X.col(j).array() * X.col(k).array()).sum();
        hess(j + 1, k + 1) = v;
        hess(k + 1, j + 1) = v;
      }
      hess(j + 1, j + 1) += ridge + 1e-10;
    }

    Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      Eigen::VectorXd cand = theta - t * step;
      const double cand_loss = loss_at(cand);
      if (cand_loss < loss) {
        theta = std::move(cand);
        loss = cand_loss;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no descent left at machine precision
  }

  WeakClassifier wc;
  wc.feature_indices = feature_indices;
  wc.coefficients.assign(theta.data() + 1, theta.data() + 1 + d);
  wc.intercept = theta[0];
  wc.converged = converged;

  Eigen::VectorXd scores = (X * theta.tail(d)).array() + theta[0];
  wc.train_auc = auc(scores, ds.labels);
  return wc;
}

// 2*sigma(intercept + w.x) - 1, i.e. tanh of half the logit.
inline double evaluate(const WeakClassifier& wc, const Eigen::RowVectorXd& row) {
  double z = wc.intercept;
  for (std::size_t j = 0; j < wc.feature_indices.size(); ++j) {
    const int f = wc.feature_indices[j];
    if (f < 0 || f >= row.size())
      throw std::invalid_argument("evaluate: row lacks required column");
    z += wc.coefficients[j] * row[f];
  }
  return std::tanh(0.5 * z);
}

// Fits every single-feature classifier (and, when enabled, every feature
// pair) and keeps the top max_classifiers by training AUC. Ties break toward
// ascending feature indices; surviving classifiers stay in enumeration order.
inline std::vector<WeakClassifier> build_pool(const Dataset& ds, const PoolConfig& cfg) {
  cfg.validate();
  ds.validate();
  const int F = static_cast<int>(ds.num_features());

  std::vector<std::vector<int>> candidates;
  for (int f = 0; f < F; ++f) candidates.push_back({f});
  if (cfg.include_pairs)
    for (int i = 0; i < F; ++i)
      for (int j = i + 1; j < F; ++j) candidates.push_back({i, j});

  std::vector<WeakClassifier> fitted(candidates.size());
  std::exception_ptr fit_error;
  const int n_threads = effective_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(n_threads)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(candidates.size()); ++c) {
    try {
      fitted[static_cast<std::size_t>(c)] =
          fit_logistic(ds, candidates[static_cast<std::size_t>(c)], cfg.logistic_max_iters,
                       cfg.logistic_tolerance);
    } catch (...) {
#pragma omp critical
      if (!fit_error) fit_error = std::current_exception();
    }
  }
  if (fit_error) std::rethrow_exception(fit_error);

  if (fitted.size() > static_cast<std::size_t>(cfg.max_classifiers)) {
    std::vector<std::size_t> order(fitted.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (fitted[a].train_auc != fitted[b].train_auc)
        return fitted[a].train_auc > fitted[b].train_auc;
      return fitted[a].feature_indices < fitted[b].feature_indices;
    });
    order.resize(static_cast<std::size_t>(cfg.max_classifiers));
    std::sort(order.begin(), order.end());
    std::vector<WeakClassifier> kept;
    kept.reserve(order.size());
    for (std::size_t i : order) kept.push_back(std::move(fitted[i]));
    return kept;
  }
  return fitted;
}

// S x N matrix of weak-classifier outputs; column i is pool[i] evaluated on
// every row.
inline Eigen::MatrixXd predict_matrix(const std::vector<WeakClassifier>& pool,
                                      const Dataset& ds) {
  if (pool.empty()) throw std::invalid_argument("predict_matrix: empty pool");
  const Eigen::Index S = ds.num_samples();
  const auto N = static_cast<Eigen::Index>(pool.size());
  for (const auto& wc : pool)
    for (int f : wc.feature_indices)
      if (f < 0 || f >= ds.num_features())
        throw std::invalid_argument("predict_matrix: classifier references a missing column");

  Eigen::MatrixXd H(S, N);
  const int n_threads = effective_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& wc = pool[static_cast<std::size_t>(i)];
    Eigen::VectorXd z = Eigen::VectorXd::Constant(S, wc.intercept);
    for (std::size_t j = 0; j < wc.feature_indices.size(); ++j)
      z += wc.coefficients[j] * ds.features.col(wc.feature_indices[j]);
    H.col(i) = (0.5 * z.array()).tanh();
  }
  return H;
}

}  // namespace cvqboost
