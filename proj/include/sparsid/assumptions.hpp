#pragma once

#include <Eigen/Core>
#include <vector>

namespace sparsid {

// Column supports of the true parameter matrix; k is the largest column
// support size, nnz the total entry count.
struct SparsityStats {
  std::vector<std::vector<Eigen::Index>> supports;
  long k = 0;
  long nnz = 0;
};

SparsityStats support_sets(const Eigen::MatrixXd& Psi_star,
                           double threshold = 0.0);

struct IncoherenceResult {
  double gamma = 0.0;  // 1 - worst l1 row norm of M*_{A^c A} (M*_{A A})^{-1}
  bool satisfied = false;
  Eigen::Index worst_column = -1;  // column of Psi* attaining the max
  Eigen::Index worst_row = -1;     // off-support row attaining the max
};

IncoherenceResult check_mutual_incoherence(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports);

struct MinEigenvalueResult {
  double C_min = 0.0;  // min over columns of lambda_min(M*_{A A})
  bool satisfied = false;
  Eigen::Index worst_column = -1;
};

MinEigenvalueResult check_min_eigenvalue(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports);

struct InfNormResult {
  double D_max = 0.0;  // max over columns of |||(M*_{A A})^{-1}|||_inf
  Eigen::Index worst_column = -1;
};

InfNormResult check_inf_norm(
    const Eigen::MatrixXd& M_star,
    const std::vector<std::vector<Eigen::Index>>& supports);

struct MinGapResult {
  double max_variant = 0.0;  // min over columns of the LARGEST |Psi*_ij| on support
  double min_variant = 0.0;  // min over columns of the smallest |Psi*_ij| on support
  bool satisfied = false;    // max_variant > 0
};

MinGapResult check_min_gap(
    const Eigen::MatrixXd& Psi_star,
    const std::vector<std::vector<Eigen::Index>>& supports);

// max_{i < j} |X_:i^T X_:j| / (||X_:i|| ||X_:j||). Throws on a zero column.
double mutual_coherence(const Eigen::MatrixXd& X);

// Population analogue: max_{i < j} |M_ij| / sqrt(M_ii M_jj).
double coherence_limit(const Eigen::MatrixXd& M_star);

struct IdentifiabilityResult {
  std::vector<bool> per_column;  // ||Psi*_:j||_0 < (1 + 1/mu) / 2
  bool all = false;
  double bound = 0.0;            // the sparsity bound; infinite when mu == 0
};

IdentifiabilityResult identifiability_check(const SparsityStats& stats,
                                            double mu);

struct AssumptionReport {
  SparsityStats sparsity;
  IncoherenceResult incoherence;
  MinEigenvalueResult min_eigenvalue;
  InfNormResult inf_norm;
  MinGapResult min_gap;
  bool all_satisfied = false;
};

AssumptionReport build_assumption_report(const Eigen::MatrixXd& Psi_star,
                                         const Eigen::MatrixXd& M_star,
                                         double support_threshold = 0.0);

struct OracleL0Result {
  Eigen::MatrixXd Psi;  // p x n, zeros off the recovered supports
  std::vector<std::vector<Eigen::Index>> supports;
  std::vector<bool> found;
  bool all_found = false;
};

/**
 * Reference l0 solve of min ||Psi_:j||_0 subject to X Psi_:j = (Y - W)_:j,
 * by exhaustive subset enumeration in order of cardinality (lexicographic
 * within a cardinality). A subset counts as feasible when its least-squares
 * residual is <= 1e-8 ||Y - W||_F. Guards: at most 14 predictors and
 * max_support <= 4, since the search is combinatorial.
 */
OracleL0Result oracle_l0(const Eigen::MatrixXd& X,
                         const Eigen::MatrixXd& Y_minus_W, long max_support);

}  // namespace sparsid
