#pragma once

#include <Eigen/Core>
#include <vector>

#include "sparsid/trajectory.hpp"

namespace sparsid {

struct LassoOptions {
  double lambda = 0.0;
  long max_sweeps = 100000;
  double tol = 1e-8;  // convergence threshold on the KKT residual
  double support_threshold = 0.0;  // |psi_ij| > threshold counts as support
};

struct ColumnSolve {
  Eigen::VectorXd psi;
  double kkt_residual = 0.0;
  long sweeps = 0;
  bool converged = false;
};

struct EstimateResult {
  Eigen::MatrixXd Psi_hat;                        // (n+m) x n
  std::vector<std::vector<Eigen::Index>> support;  // per column, ascending
  Eigen::VectorXd kkt_residuals;                   // per column
  long sweeps_used = 0;                            // max over columns
  bool converged = false;                          // all columns converged
};

double soft_threshold(double z, double t);

/**
 * Solves min_psi (1/2T) ||y - X psi||^2 + lambda ||psi||_1 by cyclic
 * coordinate descent on the precomputed Gram matrix G = (1/T) X^T X.
 *
 * Convergence is certified by the subgradient optimality residual
 *   max_i  |g_i + lambda sign(psi_i)|        if psi_i != 0
 *          max(|g_i| - lambda, 0)            if psi_i == 0
 * with g = (1/T) X^T (X psi - y); the solve stops once it drops below tol.
 */
ColumnSolve lasso_column(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const LassoOptions& opts);

// Column-wise estimate of Psi in Y = X Psi + W. Each column is the
// lasso_column solve of (X, Y.col(i)); results are bit-identical to calling
// lasso_column per column.
EstimateResult estimate_lasso(const RegressionData& data,
                              const LassoOptions& opts);

// Optimality residual of an arbitrary candidate (same formula as above).
double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& psi, double lambda);

}  // namespace sparsid
