#include "sparsid/stationary.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsid {

namespace {

void require_square_match(const Eigen::MatrixXd& A_cl,
                          const Eigen::MatrixXd& rhs) {
  if (A_cl.rows() != A_cl.cols()) {
    throw std::invalid_argument("lyapunov: A_cl must be square");
  }
  if (rhs.rows() != A_cl.rows() || rhs.cols() != A_cl.cols()) {
    throw std::invalid_argument("lyapunov: rhs dimension mismatch");
  }
  if (!rhs.isApprox(rhs.transpose(), 1e-12)) {
    throw std::invalid_argument("lyapunov: rhs must be symmetric");
  }
}

void require_schur_stable(const Eigen::MatrixXd& A_cl) {
  const double sr = spectral_radius(A_cl);
  if (sr >= 1.0 - 1e-9) {
    throw std::invalid_argument("lyapunov: spectral radius " +
                                std::to_string(sr) + " too close to 1");
  }
}

// Largest singular value via power iteration on A^T A, warm-started with the
// previous iterate's direction. Falls back to a fresh random-ish start when
// the warm start is degenerate.
double spectral_norm_warm(const Eigen::MatrixXd& A, Eigen::VectorXd& v) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  if (v.size() != A.cols() || v.norm() < 1e-300) {
    v = Eigen::VectorXd::Ones(A.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 1e-3 * double(i % 7);
  }
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw < 1e-300) return 0.0;
    w /= nw;
    const double next = std::sqrt(nw);
    const bool settled = std::abs(next - est) <= 1e-12 * (1.0 + next);
    est = next;
    v = w;
    if (settled && it >= 2) break;
  }
  return est;
}

}  // namespace

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& A_cl,
                                        const Eigen::MatrixXd& rhs) {
  require_square_match(A_cl, rhs);
  require_schur_stable(A_cl);
  Eigen::MatrixXd Q = rhs;
  Eigen::MatrixXd P = A_cl;
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd inc = P * Q * P.transpose();
    Q += inc;
    if (inc.norm() <= 1e-14 * Q.norm()) break;
    P = P * P;
  }
  // Round off asymmetry accumulated by the iteration. Built as a fresh
  // matrix: assigning the sum back into Q would alias its own transpose.
  return 0.5 * (Q + Q.transpose());
}

Eigen::MatrixXd solve_discrete_lyapunov_kronecker(const Eigen::MatrixXd& A_cl,
                                                  const Eigen::MatrixXd& rhs) {
  require_square_match(A_cl, rhs);
  require_schur_stable(A_cl);
  const Eigen::Index n = A_cl.rows();
  Eigen::MatrixXd K(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) = A_cl(i, j) * A_cl;
    }
  }
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - K;
  // vec stacks columns: vec(Q)_i = Q(i % n, i / n).
  Eigen::VectorXd b(n * n);
  for (Eigen::Index j = 0; j < n; ++j) b.segment(j * n, n) = rhs.col(j);
  const Eigen::VectorXd q = lhs.partialPivLu().solve(b);
  Eigen::MatrixXd Q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) Q.col(j) = q.segment(j * n, n);
  return 0.5 * (Q + Q.transpose());
}

Eigen::MatrixXd build_joint_covariance(const Eigen::MatrixXd& Q,
                                       const Eigen::MatrixXd& K0,
                                       double sigma_v) {
  if (Q.rows() != Q.cols()) {
    throw std::invalid_argument("joint covariance: Q must be square");
  }
  if (K0.cols() != Q.rows()) {
    throw std::invalid_argument("joint covariance: K0 column mismatch");
  }
  const Eigen::Index n = Q.rows();
  const Eigen::Index m = K0.rows();
  Eigen::MatrixXd M(n + m, n + m);
  M.topLeftCorner(n, n) = Q;
  M.topRightCorner(n, m) = Q * K0.transpose();
  M.bottomLeftCorner(m, n) = K0 * Q;
  M.bottomRightCorner(m, m) =
      K0 * Q * K0.transpose() +
      sigma_v * sigma_v * Eigen::MatrixXd::Identity(m, m);
  return 0.5 * (M + M.transpose());
}

double decay_rate_bound(const Eigen::MatrixXd& A_cl) {
  const double sr = spectral_radius(A_cl);
  return sr + std::max(1e-6, 0.01 * (1.0 - sr));
}

StabilityConstants estimate_stability_constants(const SystemModel& sys,
                                                double tol) {
  const Eigen::MatrixXd A_cl = sys.closed_loop();
  const double rho = decay_rate_bound(A_cl);
  if (rho >= 1.0) {
    throw std::invalid_argument("stability constants: closed loop not stable");
  }

  StabilityConstants out;
  out.rho = rho;

  // Track C = max over the four norm families of |||.||| / rho^tau while
  // walking powers of A_cl until the bare power norm drops below tol.
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(A_cl.rows(), A_cl.cols());
  Eigen::VectorXd v0, v1, v2, v3;
  double C = 1.0;
  double rho_tau = 1.0;
  long tau = 0;
  const long tau_cap = 1000000;
  while (true) {
    const double n0 = spectral_norm_warm(power, v0);
    const double n1 = spectral_norm_warm(power * sys.B(), v1);
    const double n2 = spectral_norm_warm(sys.K0() * power, v2);
    const double n3 = spectral_norm_warm(sys.K0() * power * sys.B(), v3);
    const double worst = std::max(std::max(n0, n1), std::max(n2, n3));
    C = std::max(C, worst / rho_tau);
    if (n0 <= tol) break;
    ++tau;
    if (tau > tau_cap) {
      throw std::runtime_error(
          "stability constants: norm scan exceeded 1e6 powers");
    }
    power = power * A_cl;
    rho_tau *= rho;
  }
  out.C = C;
  out.horizon_used = tau;
  return out;
}

StationaryStats compute_stationary_stats(const SystemModel& sys,
                                         double sigma_w, double sigma_v,
                                         double tol) {
  if (sigma_w < 0.0 || sigma_v < 0.0) {
    throw std::invalid_argument("stationary stats: negative noise scale");
  }
  const Eigen::Index n = sys.n();
  const Eigen::MatrixXd rhs =
      sigma_w * sigma_w * Eigen::MatrixXd::Identity(n, n) +
      sigma_v * sigma_v * sys.B() * sys.B().transpose();

  StationaryStats out;
  out.Q_star = solve_discrete_lyapunov(sys.closed_loop(), rhs);
  out.M_star = build_joint_covariance(out.Q_star, sys.K0(), sigma_v);
  const StabilityConstants sc = estimate_stability_constants(sys, tol);
  out.C = sc.C;
  out.rho = sc.rho;
  out.horizon_used = sc.horizon_used;
  return out;
}

}  // namespace sparsid
