#include "sparsid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsid/assumptions.hpp"

namespace sparsid {

long mismatch_error(const std::vector<std::vector<Eigen::Index>>& estimated,
                    const std::vector<std::vector<Eigen::Index>>& truth) {
  if (estimated.size() != truth.size()) {
    throw std::invalid_argument("mismatch: column count differs");
  }
  long total = 0;
  std::vector<Eigen::Index> diff;
  for (size_t j = 0; j < truth.size(); ++j) {
    auto a = estimated[j];
    auto b = truth[j];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    diff.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    total += long(diff.size());
  }
  return total;
}

long mismatch_error(const Eigen::MatrixXd& Psi_hat,
                    const Eigen::MatrixXd& Psi_star, double threshold) {
  if (Psi_hat.rows() != Psi_star.rows() || Psi_hat.cols() != Psi_star.cols()) {
    throw std::invalid_argument("mismatch: shape differs");
  }
  return mismatch_error(support_sets(Psi_hat, threshold).supports,
                        support_sets(Psi_star, threshold).supports);
}

double normalized_l2_error(const Eigen::MatrixXd& Psi_hat,
                           const Eigen::MatrixXd& Psi_star) {
  if (Psi_hat.rows() != Psi_star.rows() || Psi_hat.cols() != Psi_star.cols()) {
    throw std::invalid_argument("l2 error: shape differs");
  }
  const double denom = Psi_star.norm();
  if (denom == 0.0) {
    throw std::invalid_argument("l2 error: zero reference matrix");
  }
  return (Psi_hat - Psi_star).norm() / denom;
}

double linf_error(const Eigen::MatrixXd& Psi_hat,
                  const Eigen::MatrixXd& Psi_star) {
  if (Psi_hat.rows() != Psi_star.rows() || Psi_hat.cols() != Psi_star.cols()) {
    throw std::invalid_argument("linf error: shape differs");
  }
  return (Psi_hat - Psi_star).cwiseAbs().maxCoeff();
}

double empirical_lambda(long n, long m, long T) {
  if (n + m < 2) throw std::invalid_argument("lambda rule: n + m must be >= 2");
  if (T <= 0) throw std::invalid_argument("lambda rule: T must be positive");
  return std::sqrt(0.03 * std::log(double(n + m)) / double(T));
}

}  // namespace sparsid
