#include "sparsid/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsid {

namespace {

double log_dims_over_delta(const TheoryParams& p) {
  if (p.n <= 0 || p.m < 0) throw std::invalid_argument("theory: bad dimensions");
  if (!(p.delta > 0.0 && p.delta < 1.0)) {
    throw std::invalid_argument("theory: delta must be in (0, 1)");
  }
  return std::log(double(p.n + p.m) / p.delta);
}

void require_decay(const TheoryParams& p) {
  if (!(p.rho >= 0.0 && p.rho < 1.0) || p.C < 1.0) {
    throw std::invalid_argument("theory: need C >= 1 and rho in [0, 1)");
  }
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M,
                          const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (size_t a = 0; a < idx.size(); ++a) {
    for (size_t b = 0; b < idx.size(); ++b) out(a, b) = M(idx[a], idx[b]);
  }
  return out;
}

}  // namespace

double theorem1_lambda(const TheoryParams& p, long T) {
  require_decay(p);
  if (T <= 0) throw std::invalid_argument("theory: T must be positive");
  if (p.gamma <= 0.0) throw std::invalid_argument("theory: gamma must be > 0");
  return p.c1 * (p.C / (1.0 - p.rho)) * (p.eta * p.eta / p.gamma) *
         std::sqrt(log_dims_over_delta(p) / double(T));
}

long theorem1_min_T(const TheoryParams& p) {
  require_decay(p);
  if (p.gamma <= 0.0 || p.C_min <= 0.0 || p.Psi_min <= 0.0) {
    throw std::invalid_argument(
        "theory: gamma, C_min, Psi_min must all be > 0");
  }
  if (p.k <= 0) throw std::invalid_argument("theory: k must be positive");
  const double ratio = p.C / (1.0 - p.rho);
  const double t = p.c2 * ratio * ratio * ratio * ratio *
                   (p.D_max * p.D_max) /
                   (p.gamma * p.gamma * p.C_min * p.C_min * p.Psi_min * p.Psi_min) *
                   double(p.k) * double(p.k) * log_dims_over_delta(p);
  // Ill-conditioned instances can push the requirement past what a long can
  // hold; saturate instead of overflowing.
  if (t >= double(std::numeric_limits<long>::max())) {
    return std::numeric_limits<long>::max();
  }
  return long(std::ceil(t));
}

double theorem1_error_bound(const TheoryParams& p, long T) {
  require_decay(p);
  if (T <= 0) throw std::invalid_argument("theory: T must be positive");
  if (p.gamma <= 0.0) throw std::invalid_argument("theory: gamma must be > 0");
  return p.c3 * (p.C / (1.0 - p.rho)) * (p.D_max * p.eta * p.eta / p.gamma) *
         std::sqrt(log_dims_over_delta(p) / double(T));
}

DeterministicBound deterministic_error_bound(
    const Eigen::MatrixXd& M_emp, const Eigen::MatrixXd& M_star,
    const Eigen::VectorXd& G_col, const std::vector<Eigen::Index>& support,
    double D_max, double lambda, double eta) {
  if (M_emp.rows() != M_emp.cols() || M_star.rows() != M_star.cols() ||
      M_emp.rows() != M_star.rows() || G_col.size() != M_emp.rows()) {
    throw std::invalid_argument("deterministic bound: dimension mismatch");
  }
  if (support.empty()) {
    throw std::invalid_argument("deterministic bound: empty support");
  }
  for (Eigen::Index i : support) {
    if (i < 0 || i >= M_emp.rows()) {
      throw std::invalid_argument("deterministic bound: support out of range");
    }
  }
  if (D_max <= 0.0) {
    throw std::invalid_argument("deterministic bound: D_max must be > 0");
  }

  DeterministicBound out;
  const Eigen::MatrixXd dev = submatrix(M_emp, support) - submatrix(M_star, support);
  // Induced infinity norm: max absolute row sum.
  out.deviation = dev.cwiseAbs().rowwise().sum().maxCoeff();
  out.threshold = std::min(1.0, 2.0 * eta * eta) / (2.0 * D_max);
  out.precondition_ok = out.deviation <= out.threshold;

  double g_inf = 0.0;
  for (Eigen::Index i : support) g_inf = std::max(g_inf, std::abs(G_col(i)));
  out.bound = (2.0 * D_max * D_max * out.deviation + D_max) * (g_inf + lambda);
  return out;
}

}  // namespace sparsid
