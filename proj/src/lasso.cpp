#include "sparsid/lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsid {

namespace {

double kkt_from_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& psi,
                         double lambda) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double r = psi(i) != 0.0
                         ? std::abs(g(i) + (psi(i) > 0.0 ? lambda : -lambda))
                         : std::max(std::abs(g(i)) - lambda, 0.0);
    worst = std::max(worst, r);
  }
  return worst;
}

// Cyclic coordinate descent on (1/2) psi^T G psi - c^T psi + lambda |psi|_1,
// the Gram form of the column problem with G = (1/T) X^T X, c = (1/T) X^T y.
// Both public entry points route here so per-column and full-matrix solves
// agree bit for bit.
ColumnSolve solve_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                       const LassoOptions& opts) {
  const Eigen::Index p = c.size();
  ColumnSolve out;
  out.psi = Eigen::VectorXd::Zero(p);

  // g tracks G psi - c, i.e. (1/T) X^T (X psi - y).
  Eigen::VectorXd g = -c;
  out.kkt_residual = kkt_from_gradient(g, out.psi, opts.lambda);
  if (out.kkt_residual <= opts.tol) {
    out.converged = true;
    return out;
  }

  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = out.psi(j);
      double next = 0.0;
      if (G(j, j) > 0.0) {
        next = soft_threshold(G(j, j) * old - g(j), opts.lambda) / G(j, j);
      }
      if (next != old) {
        out.psi(j) = next;
        g += (next - old) * G.col(j);
      }
    }
    // Refresh the gradient exactly before certifying, so accumulated
    // round-off in the incremental updates cannot mask or fake convergence.
    g = G * out.psi - c;
    out.sweeps = sweep;
    out.kkt_residual = kkt_from_gradient(g, out.psi, opts.lambda);
    if (out.kkt_residual <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

void validate(const Eigen::MatrixXd& X, const LassoOptions& opts) {
  if (X.rows() == 0) throw std::invalid_argument("lasso: empty design matrix");
  if (opts.lambda < 0.0) throw std::invalid_argument("lasso: negative lambda");
  if (opts.tol <= 0.0) throw std::invalid_argument("lasso: tol must be > 0");
  if (opts.max_sweeps <= 0) {
    throw std::invalid_argument("lasso: max_sweeps must be > 0");
  }
}

}  // namespace

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

ColumnSolve lasso_column(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const LassoOptions& opts) {
  validate(X, opts);
  if (y.size() != X.rows()) {
    throw std::invalid_argument("lasso: y length mismatch");
  }
  const double invT = 1.0 / double(X.rows());
  const Eigen::MatrixXd G = invT * (X.transpose() * X);
  const Eigen::VectorXd c = invT * (X.transpose() * y);
  return solve_gram(G, c, opts);
}

EstimateResult estimate_lasso(const RegressionData& data,
                              const LassoOptions& opts) {
  validate(data.X, opts);
  if (data.Y.rows() != data.X.rows()) {
    throw std::invalid_argument("lasso: X/Y row mismatch");
  }
  const Eigen::Index p = data.X.cols();
  const Eigen::Index n = data.Y.cols();
  const double invT = 1.0 / double(data.X.rows());
  const Eigen::MatrixXd G = invT * (data.X.transpose() * data.X);

  EstimateResult out;
  out.Psi_hat.resize(p, n);
  out.support.resize(size_t(n));
  out.kkt_residuals.resize(n);
  out.converged = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd c = invT * (data.X.transpose() * data.Y.col(i));
    const ColumnSolve col = solve_gram(G, c, opts);
    out.Psi_hat.col(i) = col.psi;
    out.kkt_residuals(i) = col.kkt_residual;
    out.sweeps_used = std::max(out.sweeps_used, col.sweeps);
    out.converged = out.converged && col.converged;
    auto& sup = out.support[size_t(i)];
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(col.psi(j)) > opts.support_threshold) sup.push_back(j);
    }
  }
  return out;
}

double kkt_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& psi, double lambda) {
  if (y.size() != X.rows() || psi.size() != X.cols()) {
    throw std::invalid_argument("kkt: dimension mismatch");
  }
  if (X.rows() == 0) throw std::invalid_argument("kkt: empty design matrix");
  const Eigen::VectorXd g =
      (X.transpose() * (X * psi - y)) / double(X.rows());
  return kkt_from_gradient(g, psi, lambda);
}

}  // namespace sparsid
