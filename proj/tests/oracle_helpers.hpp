#pragma once

// Independent reference implementations used only by the tests. Each one is
// deliberately written on a different code path than the library (first-order
// instead of coordinate descent, entrywise Kronecker assembly instead of
// block assembly, explicit inverses instead of factorizations) so agreement
// is a real cross-check and not a tautology.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sparsid/rng.hpp"
#include "sparsid/system.hpp"

namespace oracle {

inline double lasso_objective(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& psi, double lambda) {
  const double T = double(X.rows());
  return (y - X * psi).squaredNorm() / (2.0 * T) + lambda * psi.lpNorm<1>();
}

// Proximal gradient (ISTA) with fixed step 1/L, L = lambda_max((1/T) X^T X).
// Runs until the iterate moves less than tol in sup norm.
inline Eigen::VectorXd ista_lasso(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, double lambda,
                                  double tol = 1e-12,
                                  long max_iters = 2000000) {
  const double T = double(X.rows());
  const Eigen::MatrixXd G = X.transpose() * X / T;
  const Eigen::VectorXd c = X.transpose() * y / T;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double L = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  const double step_thresh = lambda / L;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(X.cols());
  for (long it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd grad = G * psi - c;
    Eigen::VectorXd next(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double z = psi[i] - grad[i] / L;
      next[i] = (z > step_thresh)    ? z - step_thresh
                : (z < -step_thresh) ? z + step_thresh
                                     : 0.0;
    }
    const double move = (next - psi).lpNorm<Eigen::Infinity>();
    psi = next;
    if (move <= tol) break;
  }
  return psi;
}

inline Eigen::VectorXd normal_equations_ls(const Eigen::MatrixXd& X,
                                           const Eigen::VectorXd& y) {
  return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

// Solves A Q A^T - Q + rhs = 0 through the entrywise identity
//   vec(A Q A^T)[i + n j] = sum_{k,l} A(i,k) A(j,l) Q(k,l)
// with full-pivot LU on the n^2 x n^2 system.
inline Eigen::MatrixXd lyapunov_kron(const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& rhs) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd S(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l)
          S(i + n * j, k + n * l) = A(i, k) * A(j, l);
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(n * n, n * n) - S;
  Eigen::VectorXd b(n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) b[i + n * j] = rhs(i, j);
  const Eigen::VectorXd q = lhs.fullPivLu().solve(b);
  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) Q(i, j) = q[i + n * j];
  return Q;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     sparsid::Rng& rng) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.gaussian();
  return M;
}

inline Eigen::MatrixXd random_psd(Eigen::Index n, sparsid::Rng& rng) {
  const Eigen::MatrixXd R = random_matrix(n, n, rng);
  return R * R.transpose() / double(n);
}

// Dense A rescaled to the requested spectral radius, K0 = 0 so the loop
// matrix equals A itself.
inline sparsid::SystemModel random_stable_system(Eigen::Index n,
                                                 Eigen::Index m, double radius,
                                                 sparsid::Rng& rng) {
  Eigen::MatrixXd A = random_matrix(n, n, rng);
  const double sr = sparsid::spectral_radius(A);
  if (sr > 1e-12) A *= radius / sr;
  const Eigen::MatrixXd B = random_matrix(n, m, rng);
  return sparsid::SystemModel(A, B, Eigen::MatrixXd::Zero(m, n));
}

struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  long find(long x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Returns false when x and y were already connected.
  bool unite(long x, long y) {
    const long rx = find(x), ry = find(y);
    if (rx == ry) return false;
    parent[rx] = ry;
    return true;
  }
};

}  // namespace oracle
