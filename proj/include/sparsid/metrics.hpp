#pragma once

#include <Eigen/Core>
#include <vector>

namespace sparsid {

// Total support mismatch: over all columns, the number of indices present in
// exactly one of the two supports (false positives plus false negatives).
long mismatch_error(const std::vector<std::vector<Eigen::Index>>& estimated,
                    const std::vector<std::vector<Eigen::Index>>& truth);

// Same, computed from the matrices: an entry is in the support when its
// magnitude exceeds the threshold.
long mismatch_error(const Eigen::MatrixXd& Psi_hat,
                    const Eigen::MatrixXd& Psi_star, double threshold = 0.0);

// ||Psi_hat - Psi_star||_F / ||Psi_star||_F
double normalized_l2_error(const Eigen::MatrixXd& Psi_hat,
                           const Eigen::MatrixXd& Psi_star);

// max_ij |Psi_hat - Psi_star|
double linf_error(const Eigen::MatrixXd& Psi_hat,
                  const Eigen::MatrixXd& Psi_star);

// Empirical tuning rule used by the recovery experiments:
//   lambda = sqrt(0.03 * ln(n + m) / T)
double empirical_lambda(long n, long m, long T);

}  // namespace sparsid
