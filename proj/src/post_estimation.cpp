#include "sparsid/post_estimation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

namespace sparsid {

namespace {

constexpr double kQrSwitchCond = 1e6;

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X,
                               const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(X.rows(), Eigen::Index(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(Eigen::Index(j)) = X.col(idx[j]);
  return out;
}

}  // namespace

RefinedEstimate restricted_least_squares(
    const RegressionData& data,
    const std::vector<std::vector<Eigen::Index>>& supports) {
  const Eigen::Index p = data.X.cols();
  const Eigen::Index n = data.Y.cols();
  if (data.X.rows() != data.Y.rows() || data.X.rows() == 0) {
    throw std::invalid_argument("restricted ls: X/Y row mismatch");
  }
  if (Eigen::Index(supports.size()) != n) {
    throw std::invalid_argument("restricted ls: one support per column needed");
  }

  RefinedEstimate out;
  out.Psi_hat = Eigen::MatrixXd::Zero(p, n);
  out.support_used = supports;
  out.conditioning.assign(size_t(n), 1.0);
  out.column_ok.assign(size_t(n), true);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& sup = supports[size_t(i)];
    if (sup.empty()) continue;
    for (Eigen::Index j : sup) {
      if (j < 0 || j >= p) {
        throw std::invalid_argument("restricted ls: support index out of range");
      }
    }
    const Eigen::MatrixXd Xs = select_columns(data.X, sup);
    const Eigen::MatrixXd G = Xs.transpose() * Xs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double ev_min = es.eigenvalues().minCoeff();
    const double ev_max = es.eigenvalues().maxCoeff();
    const double cond = ev_min > 0.0
                            ? std::sqrt(ev_max / ev_min)
                            : std::numeric_limits<double>::infinity();
    out.conditioning[size_t(i)] = cond;

    Eigen::VectorXd b;
    if (cond <= kQrSwitchCond) {
      b = es.eigenvectors() *
          (es.eigenvectors().transpose() * (Xs.transpose() * data.Y.col(i)))
              .cwiseQuotient(es.eigenvalues());
    } else {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
      if (qr.rank() < Xs.cols()) {
        out.column_ok[size_t(i)] = false;
        out.all_ok = false;
        continue;
      }
      b = qr.solve(data.Y.col(i));
    }
    for (size_t j = 0; j < sup.size(); ++j) {
      out.Psi_hat(sup[j], i) = b(Eigen::Index(j));
    }
  }
  return out;
}

Eigen::MatrixXd full_least_squares(const RegressionData& data) {
  if (data.X.rows() != data.Y.rows() || data.X.rows() == 0) {
    throw std::invalid_argument("least squares: X/Y row mismatch");
  }
  if (data.X.rows() < data.X.cols()) {
    throw underdetermined_error(
        "least squares: T=" + std::to_string(data.X.rows()) +
        " rows cannot determine " + std::to_string(data.X.cols()) +
        " coefficients per column");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  return qr.solve(data.Y);
}

}  // namespace sparsid
