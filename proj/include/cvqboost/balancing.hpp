#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqboost/common.hpp"
#include "cvqboost/dataset.hpp"

namespace cvqboost {

enum class BalanceStrategy { downsample, smote, adasyn };

inline std::string to_string(BalanceStrategy s) {
  switch (s) {
    case BalanceStrategy::downsample: return "downsample";
    case BalanceStrategy::smote: return "smote";
    case BalanceStrategy::adasyn: return "adasyn";
  }
  return "?";
}

inline BalanceStrategy balance_strategy_from_string(const std::string& s) {
  if (s == "downsample") return BalanceStrategy::downsample;
  if (s == "smote") return BalanceStrategy::smote;
  if (s == "adasyn") return BalanceStrategy::adasyn;
  throw std::invalid_argument("unknown balance strategy '" + s + "'");
}

struct BalanceConfig {
  BalanceStrategy strategy = BalanceStrategy::smote;
  double target_ratio = 1.0;      // desired minority/majority ratio, in (0, 1]
  int k_neighbors = 5;            // SMOTE/ADASYN only
  std::uint64_t seed = 0;

  void validate() const {
    if (!(target_ratio > 0.0) || target_ratio > 1.0)
      throw std::invalid_argument("balance: target_ratio must be in (0, 1]");
    if (k_neighbors < 1) throw std::invalid_argument("balance: k_neighbors must be >= 1");
  }
};

namespace detail {

struct ClassSplit {
  std::vector<Eigen::Index> minority;
  std::vector<Eigen::Index> majority;
  int minority_label;
};

inline ClassSplit split_by_class(const Dataset& ds) {
  ClassSplit cs;
  cs.minority_label = ds.minority_label();
  for (Eigen::Index s = 0; s < ds.num_samples(); ++s)
    (ds.labels[s] == cs.minority_label ? cs.minority : cs.majority).push_back(s);
  if (cs.minority.empty() || cs.majority.empty())
    throw std::invalid_argument("balance: dataset must contain both classes");
  return cs;
}

// brute-force k nearest rows of `pool` to `query` (excluding an optional self
// index), ties broken by ascending row index
inline std::vector<Eigen::Index> k_nearest(const Eigen::MatrixXd& X,
                                           Eigen::Index query,
                                           const std::vector<Eigen::Index>& pool,
                                           int k, Eigen::Index self = -1) {
  std::vector<std::pair<double, Eigen::Index>> dist;
  dist.reserve(pool.size());
  for (Eigen::Index idx : pool) {
    if (idx == self || idx == query) continue;
    dist.emplace_back((X.row(idx) - X.row(query)).squaredNorm(), idx);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<Eigen::Index> out;
  out.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) out.push_back(dist[i].second);
  return out;
}

inline Eigen::Index synthetic_count(std::size_t n_minority, std::size_t n_majority,
                                    double target_ratio) {
  const auto wanted = static_cast<Eigen::Index>(
      std::ceil(target_ratio * static_cast<double>(n_majority)));
  return wanted - static_cast<Eigen::Index>(n_minority);
}

inline Dataset append_synthetic(const Dataset& ds, const std::vector<Eigen::VectorXd>& synth,
                                int minority_label) {
  Dataset out;
  out.feature_names = ds.feature_names;
  const Eigen::Index S = ds.num_samples();
  const auto extra = static_cast<Eigen::Index>(synth.size());
  out.features.resize(S + extra, ds.num_features());
  out.labels.resize(S + extra);
  out.features.topRows(S) = ds.features;
  out.labels.head(S) = ds.labels;
  for (Eigen::Index i = 0; i < extra; ++i) {
    out.features.row(S + i) = synth[static_cast<std::size_t>(i)].transpose();
    out.labels[S + i] = minority_label;
  }
  return out;
}

// largest-remainder apportionment of `total` over nonnegative weights
inline std::vector<Eigen::Index> apportion(const std::vector<double>& weights,
                                           Eigen::Index total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<Eigen::Index> out(weights.size(), 0);
  if (total <= 0) return out;
  std::vector<double> share(weights.size());
  if (sum > 0.0) {
    for (std::size_t i = 0; i < weights.size(); ++i)
      share[i] = static_cast<double>(total) * weights[i] / sum;
  } else {
    std::fill(share.begin(), share.end(),
              static_cast<double>(total) / static_cast<double>(weights.size()));
  }
  Eigen::Index assigned = 0;
  std::vector<std::pair<double, std::size_t>> rem(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = static_cast<Eigen::Index>(std::floor(share[i]));
    assigned += out[i];
    rem[i] = {share[i] - std::floor(share[i]), i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (Eigen::Index k = 0; k < total - assigned; ++k) out[rem[static_cast<std::size_t>(k)].second]++;
  return out;
}

}  // namespace detail

// Subsamples the majority class (without replacement) down to the target
// minority/majority ratio. Minority rows and relative row order are kept.
inline Dataset downsample_majority(const Dataset& ds, const BalanceConfig& cfg) {
  cfg.validate();
  auto cs = detail::split_by_class(ds);
  const double current =
      static_cast<double>(cs.minority.size()) / static_cast<double>(cs.majority.size());
  if (cfg.target_ratio < current)
    throw std::invalid_argument("downsample: target_ratio below the current class ratio");

  auto keep = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(cs.minority.size()) / cfg.target_ratio));
  keep = std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(cs.majority.size()));

  Rng rng(cfg.seed);
  rng.shuffle(cs.majority);
  std::vector<Eigen::Index> rows(cs.majority.begin(), cs.majority.begin() + keep);
  rows.insert(rows.end(), cs.minority.begin(), cs.minority.end());
  std::sort(rows.begin(), rows.end());
  return detail::take_rows(ds, rows);
}

// SMOTE oversampling: each synthetic point is x + u * (nn - x) for a random
// minority sample x, one of its k nearest minority neighbors nn and u ~ U[0,1].
// Returns the input unchanged when the target ratio is already met.
inline Dataset smote(const Dataset& ds, const BalanceConfig& cfg) {
  cfg.validate();
  auto cs = detail::split_by_class(ds);
  if (static_cast<int>(cs.minority.size()) <= cfg.k_neighbors)
    throw std::invalid_argument("smote: minority class must be larger than k_neighbors");

  const Eigen::Index n_syn =
      detail::synthetic_count(cs.minority.size(), cs.majority.size(), cfg.target_ratio);
  if (n_syn <= 0) return ds;

  std::vector<std::vector<Eigen::Index>> nn(cs.minority.size());
  for (std::size_t i = 0; i < cs.minority.size(); ++i)
    nn[i] = detail::k_nearest(ds.features, cs.minority[i], cs.minority, cfg.k_neighbors);

  Rng rng(cfg.seed);
  std::vector<Eigen::VectorXd> synth;
  synth.reserve(static_cast<std::size_t>(n_syn));
  for (Eigen::Index t = 0; t < n_syn; ++t) {
    const std::size_t i = rng.index(cs.minority.size());
    const auto& cand = nn[i];
    const Eigen::Index base = cs.minority[i];
    const Eigen::Index pick = cand[rng.index(cand.size())];
    const double u = rng.uniform();
    synth.emplace_back(ds.features.row(base).transpose() +
                       u * (ds.features.row(pick) - ds.features.row(base)).transpose());
  }
  return detail::append_synthetic(ds, synth, cs.minority_label);
}

// ADASYN oversampling: the per-sample generation budget is proportional to
// the fraction of majority points among each minority sample's k nearest
// neighbors in the full dataset; interpolation itself works as in SMOTE.
inline Dataset adasyn(const Dataset& ds, const BalanceConfig& cfg) {
  cfg.validate();
  auto cs = detail::split_by_class(ds);
  if (static_cast<int>(cs.minority.size()) <= cfg.k_neighbors)
    throw std::invalid_argument("adasyn: minority class must be larger than k_neighbors");

  const Eigen::Index n_syn =
      detail::synthetic_count(cs.minority.size(), cs.majority.size(), cfg.target_ratio);
  if (n_syn <= 0) return ds;

  std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.num_samples()));
  std::iota(all.begin(), all.end(), 0);

  std::vector<double> hardness(cs.minority.size());
  for (std::size_t i = 0; i < cs.minority.size(); ++i) {
    auto neighbors = detail::k_nearest(ds.features, cs.minority[i], all, cfg.k_neighbors,
                                       cs.minority[i]);
    int majority_hits = 0;
    for (Eigen::Index idx : neighbors) majority_hits += (ds.labels[idx] != cs.minority_label);
    hardness[i] = static_cast<double>(majority_hits) / static_cast<double>(cfg.k_neighbors);
  }
  // all-zero hardness degenerates to uniform SMOTE budgets
  const auto budgets = detail::apportion(hardness, n_syn);

  std::vector<std::vector<Eigen::Index>> nn(cs.minority.size());
  for (std::size_t i = 0; i < cs.minority.size(); ++i)
    if (budgets[i] > 0)
      nn[i] = detail::k_nearest(ds.features, cs.minority[i], cs.minority, cfg.k_neighbors);

  Rng rng(cfg.seed);
  std::vector<Eigen::VectorXd> synth;
  synth.reserve(static_cast<std::size_t>(n_syn));
  for (std::size_t i = 0; i < cs.minority.size(); ++i) {
    const Eigen::Index base = cs.minority[i];
    for (Eigen::Index t = 0; t < budgets[i]; ++t) {
      const Eigen::Index pick = nn[i][rng.index(nn[i].size())];
      const double u = rng.uniform();
      synth.emplace_back(ds.features.row(base).transpose() +
                         u * (ds.features.row(pick) - ds.features.row(base)).transpose());
    }
  }
  return detail::append_synthetic(ds, synth, cs.minority_label);
}

// Strict dispatch on strategy; the downsampler errors when the target ratio
// is below the current one.
inline Dataset balance(const Dataset& ds, const BalanceConfig& cfg) {
  switch (cfg.strategy) {
    case BalanceStrategy::smote: return smote(ds, cfg);
    case BalanceStrategy::adasyn: return adasyn(ds, cfg);
    case BalanceStrategy::downsample: return downsample_majority(ds, cfg);
  }
  throw std::invalid_argument("balance: unknown strategy");
}

inline double class_ratio(const Dataset& ds) {
  auto cs = detail::split_by_class(ds);
  return static_cast<double>(cs.minority.size()) / static_cast<double>(cs.majority.size());
}

// Clamped dispatch for ratio sweeps: a target at or below the current class
// ratio leaves the data untouched instead of erroring, for every strategy.
inline Dataset balance_toward(const Dataset& ds, const BalanceConfig& cfg) {
  cfg.validate();
  if (cfg.target_ratio <= class_ratio(ds)) return ds;
  return balance(ds, cfg);
}

}  // namespace cvqboost
