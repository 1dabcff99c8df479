#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sg/operators.hpp"

namespace sg {

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // ascending
  std::optional<Eigen::MatrixXcd> vectors;  // columns match eigenvalues
  double residual = 0.0;        // achieved residual bound
  double grouping_tol = 1e-7;   // for multiplicity grouping
};

struct EigenOptions {
  int count = -1;       // -1 = full decomposition
  double tol = 1e-9;
  bool compute_vectors = false;
  std::uint64_t seed = 0;   // start vector of the iterative solver
  Eigen::Index dense_threshold = 4000;
  double grouping_tol = 1e-7;
};

namespace detail {

/// Lanczos with full reorthogonalization; returns Ritz values of largest
/// magnitude with their residual bounds. Deterministic for a fixed seed.
inline void lanczos_extremal(const SparseC& a, int count, double tol,
                             std::uint64_t seed, Eigen::VectorXd* values,
                             double* residual) {
  const Eigen::Index n = a.rows();
  const int maxsteps =
      static_cast<int>(std::min<Eigen::Index>(n, std::max(4 * count + 40, 80)));
  Eigen::MatrixXcd v(n, maxsteps + 1);
  Rng rng(seed == 0 ? 0x5eedULL : seed);
  for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = rng.complex_normal();
  v.col(0).normalize();

  Eigen::VectorXd alpha(maxsteps), beta(maxsteps);
  int m = 0;
  for (int j = 0; j < maxsteps; ++j) {
    Eigen::VectorXcd w = a * v.col(j);
    alpha[j] = std::real(v.col(j).dot(w));
    w -= alpha[j] * v.col(j);
    if (j > 0) w -= beta[j - 1] * v.col(j - 1);
    // full reorthogonalization, twice for safety
    for (int pass = 0; pass < 2; ++pass)
      w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
    beta[j] = w.norm();
    m = j + 1;
    if (beta[j] < 1e-14) break;  // invariant subspace found
    v.col(j + 1) = w / beta[j];
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::VectorXd theta = es.eigenvalues();
  const Eigen::MatrixXd s = es.eigenvectors();

  // Ritz residual bound |beta_m * s(m-1, i)| per pair.
  std::vector<std::pair<double, double>> ritz;  // (value, residual)
  const double bm = (m < maxsteps) ? 0.0 : beta[m - 1];
  for (int i = 0; i < m; ++i)
    ritz.emplace_back(theta[i], std::abs(bm * s(m - 1, i)));

  std::sort(ritz.begin(), ritz.end(), [](const auto& x, const auto& y) {
    return std::abs(x.first) > std::abs(y.first);
  });
  const int k = std::min<int>(count, static_cast<int>(ritz.size()));
  double res = 0.0;
  std::vector<double> vals;
  for (int i = 0; i < k; ++i) {
    vals.push_back(ritz[i].first);
    res = std::max(res, ritz[i].second);
  }
  if (res > tol)
    throw NumericalError("lanczos did not converge: residual " +
                         std::to_string(res) + " above tolerance " +
                         std::to_string(tol));
  std::sort(vals.begin(), vals.end());
  *values = Eigen::Map<Eigen::VectorXd>(vals.data(), k);
  *residual = res;
}

}  // namespace detail

/// Eigenvalues (and optionally vectors) of a Hermitian operator. Dense full
/// decomposition below the dimension threshold; iterative extremal solver
/// above it (count must then be given).
inline SpectrumReport hermitian_eigen(const OperatorMatrix& a,
                                      const EigenOptions& opt = {}) {
  const double herm = a.hermiticity_residual();
  if (herm > 1e-12)
    throw ContractViolation("hermitian_eigen: input not Hermitian, residual " +
                            std::to_string(herm));
  SpectrumReport rep;
  rep.grouping_tol = opt.grouping_tol;

  if (opt.compute_vectors && opt.count >= 0)
    throw ContractViolation(
        "hermitian_eigen: eigenvectors only with a full decomposition");

  if (a.dim() <= opt.dense_threshold) {
    const Eigen::MatrixXcd dense(a.mat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        dense, opt.compute_vectors ? Eigen::ComputeEigenvectors
                                   : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("dense Hermitian eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    if (opt.count >= 0 && opt.count < ev.size()) {
      // keep the `count` eigenvalues of largest magnitude
      std::vector<double> v(ev.data(), ev.data() + ev.size());
      std::sort(v.begin(), v.end(), [](double x, double y) {
        return std::abs(x) > std::abs(y);
      });
      v.resize(opt.count);
      std::sort(v.begin(), v.end());
      ev = Eigen::Map<Eigen::VectorXd>(v.data(), opt.count);
      rep.eigenvalues = ev;
    } else {
      rep.eigenvalues = ev;
      if (opt.compute_vectors) {
        rep.vectors = es.eigenvectors();
        double res = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
          res = std::max(res, (dense * es.eigenvectors().col(i) -
                               ev[i] * es.eigenvectors().col(i))
                                  .norm());
        rep.residual = res;
        return rep;
      }
    }
    const double scale = dense.cwiseAbs().maxCoeff();
    rep.residual =
        std::numeric_limits<double>::epsilon() * scale * a.dim();
    return rep;
  }

  if (opt.count < 0)
    throw NumericalError(
        "full decomposition requested above the dense threshold; ask for k "
        "extremal eigenvalues instead");
  detail::lanczos_extremal(a.mat, opt.count, opt.tol, opt.seed,
                           &rep.eigenvalues, &rep.residual);
  return rep;
}

/// Largest absolute eigenvalue of the Hermitian difference A - B.
inline double operator_norm_diff(const OperatorMatrix& a,
                                 const OperatorMatrix& b) {
  if (!a.basis.compatible(b.basis))
    throw ContractViolation("operator_norm_diff: basis mismatch (" +
                            a.basis.describe() + " vs " + b.basis.describe() +
                            ")");
  OperatorMatrix d = make_operator(SparseC(a.mat - b.mat), a.basis);
  // The difference of Hermitian matrices stored exactly is Hermitian; guard
  // against accidental misuse anyway.
  EigenOptions opt;
  if (d.dim() > opt.dense_threshold) opt.count = 2;
  const SpectrumReport rep = hermitian_eigen(d, opt);
  double norm = 0.0;
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    norm = std::max(norm, std::abs(rep.eigenvalues[i]));
  return norm;
}

/// Groups a sorted eigenvalue list into (representative, multiplicity) pairs.
inline std::vector<std::pair<double, int>> group_multiplicities(
    const Eigen::VectorXd& sorted, double tol = 1e-7) {
  std::vector<std::pair<double, int>> groups;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    if (!groups.empty() && std::abs(sorted[i] - groups.back().first) <= tol) {
      auto& [val, mult] = groups.back();
      val = (val * mult + sorted[i]) / (mult + 1);
      ++mult;
    } else {
      groups.emplace_back(sorted[i], 1);
    }
  }
  return groups;
}

}  // namespace sg
