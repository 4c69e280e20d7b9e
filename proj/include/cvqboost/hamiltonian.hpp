#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqboost/common.hpp"

namespace cvqboost {

// Quadratic problem min w'Jw + C'w over {w >= 0, sum w = R}. The constant
// dropped when rewriting the boosting loss into this form is kept as
// `offset` so energies and losses stay interconvertible.
struct Hamiltonian {
  Eigen::MatrixXd J;
  Eigen::VectorXd C;
  double offset = 0.0;
  double lambda = 0.0;
  double sum_constraint = 1.0;

  Eigen::Index size() const { return C.size(); }

  // J * w through the symmetric view; reads only the lower triangle
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const {
    return J.selfadjointView<Eigen::Lower>() * w;
  }

  void validate() const {
    if (C.size() < 1) throw std::invalid_argument("hamiltonian: N must be >= 1");
    if (J.rows() != C.size() || J.cols() != C.size())
      throw std::invalid_argument("hamiltonian: J/C dimension mismatch");
    if (!(sum_constraint > 0.0))
      throw std::invalid_argument("hamiltonian: sum_constraint must be positive");
    if (lambda < 0.0) throw std::invalid_argument("hamiltonian: lambda must be >= 0");
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("hamiltonian: J must be symmetric");
  }
};

// J_ij = sum_s h_i(x_s) h_j(x_s) + lambda * delta_ij
// C_i  = -2 sum_s y_s h_i(x_s)
// offset = sum_s y_s^2 (= S for labels in {-1,+1})
//
// The Gram product is accumulated over fixed-size sample blocks so the work
// parallelizes without depending on the thread count for its result.
inline Hamiltonian assemble(const Eigen::MatrixXd& predictions, const Eigen::VectorXi& labels,
                            double lambda, double sum_constraint = 1.0) {
  if (predictions.rows() != labels.size())
    throw std::invalid_argument("assemble: prediction rows must match label count");
  if (predictions.rows() < 1 || predictions.cols() < 1)
    throw std::invalid_argument("assemble: empty prediction matrix");
  if (lambda < 0.0) throw std::invalid_argument("assemble: lambda must be >= 0");

  const Eigen::Index S = predictions.rows();
  const Eigen::Index N = predictions.cols();

  constexpr Eigen::Index kBlock = 1024;
  const Eigen::Index n_blocks = (S + kBlock - 1) / kBlock;

  Hamiltonian ham;
  ham.J = Eigen::MatrixXd::Zero(N, N);
  const int n_threads = effective_threads();
#if defined(_OPENMP)
  if (n_threads > 1 && n_blocks > 1) {
    std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(n_threads),
                                         Eigen::MatrixXd::Zero(N, N));
#pragma omp parallel num_threads(n_threads)
    {
      auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
      for (Eigen::Index b = 0; b < n_blocks; ++b) {
        const Eigen::Index lo = b * kBlock;
        const Eigen::Index rows = std::min(kBlock, S - lo);
        local.selfadjointView<Eigen::Lower>().rankUpdate(
            predictions.middleRows(lo, rows).transpose());
      }
    }
    for (const auto& part : partial) ham.J += part;  // thread-ordered reduction
  } else {
    ham.J.selfadjointView<Eigen::Lower>().rankUpdate(predictions.transpose());
  }
#else
  ham.J.selfadjointView<Eigen::Lower>().rankUpdate(predictions.transpose());
#endif
  ham.J.triangularView<Eigen::StrictlyUpper>() =
      ham.J.transpose().triangularView<Eigen::StrictlyUpper>();
  ham.J.diagonal().array() += lambda;

  Eigen::VectorXd y = labels.cast<double>();
  ham.C = -2.0 * (predictions.transpose() * y);
  ham.offset = y.squaredNorm();
  ham.lambda = lambda;
  ham.sum_constraint = sum_constraint;
  return ham;
}

// w'Jw + C'w, offset excluded.
inline double energy(const Hamiltonian& ham, const Eigen::VectorXd& w) {
  if (w.size() != ham.size()) throw std::invalid_argument("energy: weight length mismatch");
  return w.dot(ham.apply(w)) + ham.C.dot(w);
}

// The regularized boosting loss sum_s |sum_i w_i h_i(x_s) - y_s|^2 +
// lambda * sum_i w_i^2, computed directly from predictions.
inline double boost_loss(const Eigen::MatrixXd& predictions, const Eigen::VectorXi& labels,
                         double lambda, const Eigen::VectorXd& w) {
  if (predictions.rows() != labels.size())
    throw std::invalid_argument("boost_loss: prediction rows must match label count");
  if (predictions.cols() != w.size())
    throw std::invalid_argument("boost_loss: weight length mismatch");
  Eigen::VectorXd resid = predictions * w - labels.cast<double>();
  return resid.squaredNorm() + lambda * w.squaredNorm();
}

// 10*log10 of max|c| / min nonzero |c| over all entries of J and C.
inline double dynamic_range_db(const Hamiltonian& ham) {
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  auto scan = [&](double v) {
    const double a = std::abs(v);
    if (a == 0.0) return;
    max_abs = std::max(max_abs, a);
    min_abs = std::min(min_abs, a);
  };
  for (Eigen::Index i = 0; i < ham.J.rows(); ++i)
    for (Eigen::Index j = 0; j < ham.J.cols(); ++j) scan(ham.J(i, j));
  for (Eigen::Index i = 0; i < ham.C.size(); ++i) scan(ham.C[i]);
  if (max_abs == 0.0)
    throw std::invalid_argument("dynamic_range_db: all-zero Hamiltonian");
  return 10.0 * std::log10(max_abs / min_abs);
}

// Clamps small coefficients so the dynamic range fits within max_db:
// every nonzero |c| below max|c| / 10^(max_db/10) becomes sign(c) times that
// floor. Zeros are untouched. Idempotent.
inline Hamiltonian quantize_to_range(const Hamiltonian& ham, double max_db) {
  if (!(max_db > 0.0)) throw std::invalid_argument("quantize_to_range: max_db must be positive");
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < ham.J.rows(); ++i)
    for (Eigen::Index j = 0; j < ham.J.cols(); ++j)
      max_abs = std::max(max_abs, std::abs(ham.J(i, j)));
  for (Eigen::Index i = 0; i < ham.C.size(); ++i)
    max_abs = std::max(max_abs, std::abs(ham.C[i]));
  if (max_abs == 0.0) return ham;

  const double floor = max_abs / std::pow(10.0, max_db / 10.0);
  Hamiltonian out = ham;
  auto clamp = [&](double v) {
    if (v == 0.0) return v;
    if (std::abs(v) < floor) return v < 0.0 ? -floor : floor;
    return v;
  };
  for (Eigen::Index i = 0; i < out.J.rows(); ++i)
    for (Eigen::Index j = 0; j < out.J.cols(); ++j) out.J(i, j) = clamp(out.J(i, j));
  for (Eigen::Index i = 0; i < out.C.size(); ++i) out.C[i] = clamp(out.C[i]);
  return out;
}

// JSON wire format: {"n", "j" (row-major lower triangle), "c", "offset",
// "lambda", "sum_constraint"}.
inline nlohmann::json hamiltonian_to_json(const Hamiltonian& ham) {
  ham.validate();
  const Eigen::Index N = ham.size();
  std::vector<double> tri;
  tri.reserve(static_cast<std::size_t>(N * (N + 1) / 2));
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) tri.push_back(ham.J(i, j));
  std::vector<double> c(ham.C.data(), ham.C.data() + N);
  return nlohmann::json{{"n", N},           {"j", tri},
                        {"c", c},           {"offset", ham.offset},
                        {"lambda", ham.lambda}, {"sum_constraint", ham.sum_constraint}};
}

inline Hamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  for (const char* key : {"n", "j", "c", "offset", "lambda", "sum_constraint"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("hamiltonian: missing field '") + key + "'");
  const auto N = j.at("n").get<Eigen::Index>();
  if (N < 1) throw std::runtime_error("hamiltonian: n must be >= 1");
  const auto tri = j.at("j").get<std::vector<double>>();
  const auto c = j.at("c").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(tri.size()) != N * (N + 1) / 2)
    throw std::runtime_error("hamiltonian: 'j' must hold the lower triangle (n*(n+1)/2 values)");
  if (static_cast<Eigen::Index>(c.size()) != N)
    throw std::runtime_error("hamiltonian: 'c' length must equal n");
  Hamiltonian ham;
  ham.J.resize(N, N);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index jj = 0; jj <= i; ++jj) {
      ham.J(i, jj) = tri[k];
      ham.J(jj, i) = tri[k];
      ++k;
    }
  ham.C = Eigen::Map<const Eigen::VectorXd>(c.data(), N);
  ham.offset = j.at("offset").get<double>();
  ham.lambda = j.at("lambda").get<double>();
  ham.sum_constraint = j.at("sum_constraint").get<double>();
  ham.validate();
  return ham;
}

inline void save_hamiltonian(const Hamiltonian& ham, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_hamiltonian: cannot open '" + path + "'");
  out << hamiltonian_to_json(ham).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_hamiltonian: write failed for '" + path + "'");
}

inline Hamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_hamiltonian: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_hamiltonian: '" + path + "': " + e.what());
  }
  try {
    return hamiltonian_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error("load_hamiltonian: '" + path + "': " + e.what());
  }
}

}  // namespace cvqboost
