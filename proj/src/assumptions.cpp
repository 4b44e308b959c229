#include "sparsid/assumptions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsid {

namespace {

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& M,
                                    const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (size_t a = 0; a < idx.size(); ++a) {
    for (size_t b = 0; b < idx.size(); ++b) out(a, b) = M(idx[a], idx[b]);
  }
  return out;
}

void validate_supports(const Eigen::MatrixXd& M,
                       const std::vector<std::vector<Eigen::Index>>& supports) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("assumptions: M must be square");
  }
  bool any = false;
  for (const auto& sup : supports) {
    any = any || !sup.empty();
    for (Eigen::Index i : sup) {
      if (i < 0 || i >= M.rows()) {
        throw std::invalid_argument("assumptions: support index out of range");
      }
    }
  }
  if (!any) {
    throw std::invalid_argument("assumptions: every column support is empty");
  }
}

// Advances idx to the next k-subset of {0..p-1} in lexicographic order.
bool next_combination(std::vector<Eigen::Index>& idx, Eigen::Index p) {
  const long k = long(idx.size());
  for (long i = k - 1; i >= 0; --i) {
    if (idx[size_t(i)] < p - (k - i)) {
      ++idx[size_t(i)];
      for (long j = i + 1; j < k; ++j) idx[size_t(j)] = idx[size_t(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

SparsityStats support_sets(const Eigen::MatrixXd& Psi_star, double threshold) {
  SparsityStats out;
  out.supports.resize(size_t(Psi_star.cols()));
  for (Eigen::Index j = 0; j < Psi_star.cols(); ++j) {
    auto& sup = out.supports[size_t(j)];
    for (Eigen::Index i = 0; i < Psi_star.rows(); ++i) {
      if (std::abs(Psi_star(i, j)) > threshold) sup.push_back(i);
    }
    out.k = std::max(out.k, long(sup.size()));
    out.nnz += long(sup.size());
  }
  return out;
}

IncoherenceResult check_mutual_incoherence(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports) {
  validate_supports(M_star, supports);
  IncoherenceResult out;
  double worst = 0.0;
  for (size_t j = 0; j < supports.size(); ++j) {
    const auto& sup = supports[j];
    if (sup.empty()) continue;
    const Eigen::MatrixXd Maa_inv =
        principal_submatrix(M_star, sup).partialPivLu().inverse();
    std::vector<bool> on_support(size_t(M_star.rows()), false);
    for (Eigen::Index i : sup) on_support[size_t(i)] = true;
    for (Eigen::Index i = 0; i < M_star.rows(); ++i) {
      if (on_support[size_t(i)]) continue;
      Eigen::RowVectorXd row(sup.size());
      for (size_t b = 0; b < sup.size(); ++b) row(Eigen::Index(b)) = M_star(i, sup[b]);
      const double l1 = (row * Maa_inv).cwiseAbs().sum();
      if (l1 > worst) {
        worst = l1;
        out.worst_column = Eigen::Index(j);
        out.worst_row = i;
      }
    }
  }
  out.gamma = 1.0 - worst;
  out.satisfied = out.gamma > 0.0;
  return out;
}

MinEigenvalueResult check_min_eigenvalue(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports) {
  validate_supports(M_star, supports);
  MinEigenvalueResult out;
  out.C_min = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < supports.size(); ++j) {
    if (supports[j].empty()) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        principal_submatrix(M_star, supports[j]));
    const double ev = es.eigenvalues().minCoeff();
    if (ev < out.C_min) {
      out.C_min = ev;
      out.worst_column = Eigen::Index(j);
    }
  }
  out.satisfied = out.C_min > 0.0;
  return out;
}

InfNormResult check_inf_norm(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports) {
  validate_supports(M_star, supports);
  InfNormResult out;
  for (size_t j = 0; j < supports.size(); ++j) {
    if (supports[j].empty()) continue;
    const Eigen::MatrixXd inv =
        principal_submatrix(M_star, supports[j]).partialPivLu().inverse();
    const double norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm > out.D_max) {
      out.D_max = norm;
      out.worst_column = Eigen::Index(j);
    }
  }
  return out;
}

MinGapResult check_min_gap(
    const Eigen::MatrixXd& Psi_star,
    const std::vector<std::vector<Eigen::Index>>& supports) {
  if (Eigen::Index(supports.size()) != Psi_star.cols()) {
    throw std::invalid_argument("min gap: one support per column needed");
  }
  MinGapResult out;
  out.max_variant = std::numeric_limits<double>::infinity();
  out.min_variant = std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t j = 0; j < supports.size(); ++j) {
    const auto& sup = supports[j];
    if (sup.empty()) continue;
    any = true;
    double col_max = 0.0;
    double col_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : sup) {
      const double a = std::abs(Psi_star(i, Eigen::Index(j)));
      col_max = std::max(col_max, a);
      col_min = std::min(col_min, a);
    }
    out.max_variant = std::min(out.max_variant, col_max);
    out.min_variant = std::min(out.min_variant, col_min);
  }
  if (!any) {
    throw std::invalid_argument("min gap: every column support is empty");
  }
  out.satisfied = out.max_variant > 0.0;
  return out;
}

double mutual_coherence(const Eigen::MatrixXd& X) {
  if (X.cols() < 2) return 0.0;
  Eigen::VectorXd norms(X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    norms(i) = X.col(i).norm();
    if (norms(i) == 0.0) {
      throw std::invalid_argument("mutual coherence: zero column " +
                                  std::to_string(i));
    }
  }
  double mu = 0.0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < X.cols(); ++j) {
      mu = std::max(mu, std::abs(X.col(i).dot(X.col(j))) / (norms(i) * norms(j)));
    }
  }
  return mu;
}

double coherence_limit(const Eigen::MatrixXd& M_star) {
  if (M_star.rows() != M_star.cols()) {
    throw std::invalid_argument("coherence limit: M must be square");
  }
  double mu = 0.0;
  for (Eigen::Index i = 0; i < M_star.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < M_star.cols(); ++j) {
      const double d = M_star(i, i) * M_star(j, j);
      if (d <= 0.0) {
        throw std::invalid_argument("coherence limit: nonpositive diagonal");
      }
      mu = std::max(mu, std::abs(M_star(i, j)) / std::sqrt(d));
    }
  }
  return mu;
}

IdentifiabilityResult identifiability_check(const SparsityStats& stats,
                                            double mu) {
  if (mu < 0.0) throw std::invalid_argument("identifiability: negative mu");
  IdentifiabilityResult out;
  out.bound = mu == 0.0 ? std::numeric_limits<double>::infinity()
                        : 0.5 * (1.0 + 1.0 / mu);
  out.all = true;
  out.per_column.reserve(stats.supports.size());
  for (const auto& sup : stats.supports) {
    const bool ok = double(sup.size()) < out.bound;
    out.per_column.push_back(ok);
    out.all = out.all && ok;
  }
  return out;
}

AssumptionReport build_assumption_report(const Eigen::MatrixXd& Psi_star,
                                         const Eigen::MatrixXd& M_star,
                                         double support_threshold) {
  if (M_star.rows() != Psi_star.rows()) {
    throw std::invalid_argument("assumption report: Psi/M row mismatch");
  }
  AssumptionReport out;
  out.sparsity = support_sets(Psi_star, support_threshold);
  out.incoherence = check_mutual_incoherence(M_star, out.sparsity.supports);
  out.min_eigenvalue = check_min_eigenvalue(M_star, out.sparsity.supports);
  out.inf_norm = check_inf_norm(M_star, out.sparsity.supports);
  out.min_gap = check_min_gap(Psi_star, out.sparsity.supports);
  out.all_satisfied = out.incoherence.satisfied &&
                      out.min_eigenvalue.satisfied && out.min_gap.satisfied;
  return out;
}

OracleL0Result oracle_l0(const Eigen::MatrixXd& X,
                         const Eigen::MatrixXd& Y_minus_W, long max_support) {
  const Eigen::Index p = X.cols();
  const Eigen::Index n = Y_minus_W.cols();
  if (X.rows() != Y_minus_W.rows() || X.rows() == 0) {
    throw std::invalid_argument("l0 oracle: X/Y row mismatch");
  }
  if (p > 14) {
    throw std::invalid_argument("l0 oracle: more than 14 predictors");
  }
  if (max_support < 0 || max_support > 4) {
    throw std::invalid_argument("l0 oracle: max_support must be in [0, 4]");
  }

  const double tol = 1e-8 * Y_minus_W.norm();
  OracleL0Result out;
  out.Psi = Eigen::MatrixXd::Zero(p, n);
  out.supports.resize(size_t(n));
  out.found.assign(size_t(n), false);
  out.all_found = true;

  for (Eigen::Index col = 0; col < n; ++col) {
    const Eigen::VectorXd y = Y_minus_W.col(col);
    bool found = false;
    for (long k = 0; k <= max_support && !found; ++k) {
      if (k == 0) {
        if (y.norm() <= tol) found = true;
        continue;
      }
      std::vector<Eigen::Index> idx(static_cast<size_t>(k));
      for (long i = 0; i < k; ++i) idx[size_t(i)] = i;
      do {
        Eigen::MatrixXd Xs(X.rows(), k);
        for (long i = 0; i < k; ++i) Xs.col(i) = X.col(idx[size_t(i)]);
        const Eigen::VectorXd b =
            Xs.colPivHouseholderQr().solve(y);
        if ((Xs * b - y).norm() <= tol) {
          out.supports[size_t(col)] = idx;
          for (long i = 0; i < k; ++i) out.Psi(idx[size_t(i)], col) = b(i);
          found = true;
          break;
        }
      } while (next_combination(idx, p));
    }
    out.found[size_t(col)] = found;
    out.all_found = out.all_found && found;
  }
  return out;
}

}  // namespace sparsid
