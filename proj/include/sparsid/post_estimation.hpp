#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "sparsid/trajectory.hpp"

namespace sparsid {

// Thrown by full_least_squares when T < n + m, so callers can distinguish an
// underdetermined design from other failures.
class underdetermined_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RefinedEstimate {
  Eigen::MatrixXd Psi_hat;               // (n+m) x n, zeros off support
  std::vector<std::vector<Eigen::Index>> support_used;
  std::vector<double> conditioning;      // per-column condition estimate
  std::vector<bool> column_ok;           // false when the restricted solve failed
  bool all_ok = true;
};

/**
 * Debiasing step: per column, ordinary least squares restricted to the given
 * support, zeros elsewhere. Well-conditioned columns go through the normal
 * equations; a restricted condition number above 1e6 switches that column to
 * a QR solve, and rank deficiency marks it failed (coefficients zero).
 */
RefinedEstimate restricted_least_squares(
    const RegressionData& data,
    const std::vector<std::vector<Eigen::Index>>& supports);

// Unrestricted least squares Psi = argmin ||Y - X Psi||_F, the dense baseline.
// Throws underdetermined_error when the design has fewer rows than columns.
Eigen::MatrixXd full_least_squares(const RegressionData& data);

}  // namespace sparsid
