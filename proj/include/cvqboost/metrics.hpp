#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cvqboost {

// Rank-based (Mann-Whitney) AUC: probability that a random positive outranks
// a random negative, ties counted as 1/2. Computed through midranks.
inline double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc: score/label length mismatch");
  const Eigen::Index n = scores.size();
  Eigen::Index n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] == 1)
      ++n_pos;
    else if (labels[i] == -1)
      ++n_neg;
    else
      throw std::invalid_argument("auc: labels must be -1 or +1");
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc: both classes must be present");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
    for (Eigen::Index k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& labels) {
  if (predicted.size() != labels.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.size() == 0) throw std::invalid_argument("accuracy: empty input");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < predicted.size(); ++i) hits += (predicted[i] == labels[i]);
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

// (TPR + TNR) / 2
inline double balanced_accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& labels) {
  if (predicted.size() != labels.size())
    throw std::invalid_argument("balanced_accuracy: length mismatch");
  Eigen::Index tp = 0, fn = 0, tn = 0, fp = 0;
  for (Eigen::Index i = 0; i < predicted.size(); ++i) {
    if (labels[i] == 1)
      (predicted[i] == 1 ? tp : fn)++;
    else
      (predicted[i] == -1 ? tn : fp)++;
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw std::invalid_argument("balanced_accuracy: both classes must be present");
  const double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (tpr + tnr);
}

}  // namespace cvqboost
