#pragma once

#include <Eigen/Core>

#include "sparsid/system.hpp"

namespace sparsid {

// Stationary second moments of the closed loop plus the exponential-decay
// certificate (C, rho) used by the sample-complexity formulas.
struct StationaryStats {
  Eigen::MatrixXd Q_star;  // n x n state covariance
  Eigen::MatrixXd M_star;  // (n+m) x (n+m) joint [x; u] covariance
  double C = 1.0;
  double rho = 0.0;
  long horizon_used = 0;
};

// Solves A_cl Q A_cl^T - Q + rhs = 0 by the doubling (Smith) iteration
//   Q_{k+1} = Q_k + P_k Q_k P_k^T,  P_{k+1} = P_k^2,  Q_0 = rhs, P_0 = A_cl.
// Requires spectral_radius(A_cl) < 1 - 1e-9 and symmetric rhs.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& A_cl,
                                        const Eigen::MatrixXd& rhs);

// Same equation solved exactly through the vectorized linear system
//   (I - A_cl (x) A_cl) vec(Q) = vec(rhs).
// O(n^6); intended for cross-checks and small n.
Eigen::MatrixXd solve_discrete_lyapunov_kronecker(const Eigen::MatrixXd& A_cl,
                                                  const Eigen::MatrixXd& rhs);

// Block assembly [[Q, Q K0^T], [K0 Q, K0 Q K0^T + sigma_v^2 I]].
Eigen::MatrixXd build_joint_covariance(const Eigen::MatrixXd& Q,
                                       const Eigen::MatrixXd& K0,
                                       double sigma_v);

// Certified decay-rate upper bound: spectral radius of A_cl plus a margin of
// max(1e-6, 0.01 * (1 - spectral radius)). Always strictly above the radius,
// and < 1 exactly when the matrix is Schur stable.
double decay_rate_bound(const Eigen::MatrixXd& A_cl);

struct StabilityConstants {
  double C = 1.0;
  double rho = 0.0;
  long horizon_used = 0;
};

// Scans tau = 0, 1, ... until |||A_cl^tau||| <= tol, and certifies
//   |||A_cl^tau|||, |||A_cl^tau B|||, |||K0 A_cl^tau|||, |||K0 A_cl^tau B|||
//     <= C * rho^tau
// over the scanned horizon, with rho = decay_rate_bound(A_cl) and the
// smallest C >= 1 that fits. Throws if the scan passes 10^6 powers.
StabilityConstants estimate_stability_constants(const SystemModel& sys,
                                                double tol = 1e-10);

StationaryStats compute_stationary_stats(const SystemModel& sys,
                                         double sigma_w, double sigma_v,
                                         double tol = 1e-10);

}  // namespace sparsid
