#pragma once

#include <Eigen/Core>
#include <vector>

namespace sparsid {

/**
 * Inputs to the finite-sample recovery guarantees. (C, rho) certify the
 * closed loop's exponential decay, eta bounds the sub-Gaussian norms of the
 * noises, and (gamma, C_min, D_max, Psi_min, k) summarize the incoherence,
 * conditioning, and sparsity of the true model.
 */
struct TheoryParams {
  double C = 1.0;
  double rho = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double C_min = 0.0;
  double D_max = 0.0;
  double Psi_min = 0.0;
  long k = 0;
  long n = 0;
  long m = 0;
  double delta = 0.05;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
};

// lambda = c1 * (C / (1 - rho)) * (eta^2 / gamma) * sqrt(log((n+m)/delta) / T)
double theorem1_lambda(const TheoryParams& p, long T);

// Smallest integer T with
//   T >= c2 * (C^4 / (1-rho)^4) * (D_max^2 / (gamma^2 C_min^2 Psi_min^2))
//        * k^2 * log((n+m)/delta)
long theorem1_min_T(const TheoryParams& p);

// Elementwise error bound at sample size T:
//   c3 * (C / (1-rho)) * (D_max eta^2 / gamma) * sqrt(log((n+m)/delta) / T)
double theorem1_error_bound(const TheoryParams& p, long T);

struct DeterministicBound {
  double bound = 0.0;       // sup-norm bound on the on-support error
  bool precondition_ok = false;
  double deviation = 0.0;   // |||M_AA - M*_AA|||_inf actually observed
  double threshold = 0.0;   // admissible deviation min{1, 2 eta^2} / (2 D_max)
};

/**
 * Data-dependent bound on the restricted estimation error of one column:
 *   ||E_A||_inf <= (2 D_max^2 |||M_AA - M*_AA|||_inf + D_max)
 *                  * (||G_A||_inf + lambda)
 * valid when |||M_AA - M*_AA|||_inf <= min{1, 2 eta^2} / (2 D_max). M_emp and
 * M_star are the full (n+m) x (n+m) second-moment matrices, G_col is the loss
 * gradient at the TRUE column, (1/T) X^T (X psi_star - y) = -(1/T) X^T W_col
 * (only the magnitudes of its on-support entries enter the bound), and
 * support is the active set A.
 */
DeterministicBound deterministic_error_bound(
    const Eigen::MatrixXd& M_emp, const Eigen::MatrixXd& M_star,
    const Eigen::VectorXd& G_col, const std::vector<Eigen::Index>& support,
    double D_max, double lambda, double eta);

}  // namespace sparsid
