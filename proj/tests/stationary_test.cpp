#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "sparsid/rng.hpp"
#include "sparsid/stationary.hpp"
#include "sparsid/system.hpp"

using namespace sparsid;

TEST_CASE("solve_discrete_lyapunov closed forms") {
  SUBCASE("A = 0 returns the right-hand side") {
    const Eigen::MatrixXd Q = solve_discrete_lyapunov(
        Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Identity(3, 3));
    CHECK((Q - Eigen::MatrixXd::Identity(3, 3)).lpNorm<Eigen::Infinity>() <
          1e-15);
  }

  SUBCASE("scalar fixed point q = 1 / (1 - a^2)") {
    Eigen::MatrixXd a(1, 1), rhs(1, 1);
    a << 0.5;
    rhs << 1.0;
    const Eigen::MatrixXd Q = solve_discrete_lyapunov(a, rhs);
    CHECK(Q(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  }

  SUBCASE("rejects unstable and asymmetric inputs") {
    CHECK_THROWS(solve_discrete_lyapunov(Eigen::MatrixXd::Identity(2, 2),
                                         Eigen::MatrixXd::Identity(2, 2)));
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS(solve_discrete_lyapunov(
        0.5 * Eigen::MatrixXd::Identity(2, 2), asym));
  }
}

TEST_CASE("solve_discrete_lyapunov agrees with an elementwise Kronecker "
          "oracle") {
  Rng rng(2024, 0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A = oracle::random_matrix(5, 5, rng);
    A *= 0.8 / spectral_radius(A);
    const Eigen::MatrixXd rhs = oracle::random_psd(5, rng);

    const Eigen::MatrixXd Q = solve_discrete_lyapunov(A, rhs);
    const Eigen::MatrixXd Q_oracle = oracle::lyapunov_kron(A, rhs);
    CHECK((Q - Q_oracle).lpNorm<Eigen::Infinity>() < 1e-9);

    // Residual and symmetry of the returned solution.
    const Eigen::MatrixXd res = A * Q * A.transpose() - Q + rhs;
    CHECK(res.norm() <= 1e-10 * rhs.norm());
    CHECK((Q - Q.transpose()).lpNorm<Eigen::Infinity>() == 0.0);

    // The library's own vectorized direct solve matches too.
    const Eigen::MatrixXd Q_direct = solve_discrete_lyapunov_kronecker(A, rhs);
    CHECK((Q - Q_direct).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("build_joint_covariance") {
  SUBCASE("decoupled blocks") {
    const Eigen::MatrixXd M = build_joint_covariance(
        Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(1, 2), 1.0);
    CHECK((M - Eigen::MatrixXd::Identity(3, 3)).lpNorm<Eigen::Infinity>() ==
          0.0);
  }

  SUBCASE("rank-deficient all-ones block structure") {
    const Eigen::MatrixXd M = build_joint_covariance(
        Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2),
        0.0);
    Eigen::MatrixXd expected(4, 4);
    expected << 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1;
    CHECK((M - expected).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("symmetric by construction") {
    Rng rng(77, 0);
    const Eigen::MatrixXd Q = oracle::random_psd(4, rng);
    const Eigen::MatrixXd K0 = oracle::random_matrix(2, 4, rng);
    const Eigen::MatrixXd M = build_joint_covariance(Q, K0, 0.7);
    CHECK((M - M.transpose()).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
}

TEST_CASE("decay_rate_bound adds the documented margin") {
  CHECK(decay_rate_bound(0.5 * Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(0.505).epsilon(1e-12));
  // Nilpotent matrix: spectral radius 0, margin 0.01 * (1 - 0).
  Eigen::MatrixXd N(2, 2);
  N << 0.0, 10.0, 0.0, 0.0;
  CHECK(decay_rate_bound(N) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("estimate_stability_constants") {
  SUBCASE("normal matrix needs no transient allowance") {
    SystemModel sys(0.5 * Eigen::MatrixXd::Identity(2, 2),
                    Eigen::MatrixXd::Identity(2, 2),
                    Eigen::MatrixXd::Zero(2, 2));
    const StabilityConstants sc = estimate_stability_constants(sys);
    CHECK(sc.rho == doctest::Approx(0.505).epsilon(1e-12));
    CHECK(sc.C == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("nilpotent transient forces a large envelope constant") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 10.0, 0.0, 0.0;
    SystemModel sys(A, Eigen::MatrixXd::Zero(2, 1),
                    Eigen::MatrixXd::Zero(1, 2));
    const StabilityConstants sc = estimate_stability_constants(sys);
    CHECK(sc.C >= 10.0);
  }

  SUBCASE("certificate holds over the scanned horizon") {
    Rng rng(31, 0);
    const SystemModel sys = oracle::random_stable_system(4, 2, 0.85, rng);
    const StabilityConstants sc = estimate_stability_constants(sys);
    CHECK(sc.C >= 1.0);
    CHECK(sc.rho < 1.0);

    const Eigen::MatrixXd A_cl = sys.closed_loop();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(4, 4);
    const long horizon = std::min(sc.horizon_used, long(200));
    for (long tau = 0; tau <= horizon; ++tau) {
      const double envelope = sc.C * std::pow(sc.rho, double(tau));
      // Slack covers the power-iteration accuracy of the internal norm
      // estimates, which can sit slightly below the exact SVD value.
      const double slack = 1e-9 * (1.0 + envelope);
      CHECK(P.operatorNorm() <= envelope + slack);
      CHECK((P * sys.B()).operatorNorm() <= envelope + slack);
      CHECK((sys.K0() * P).operatorNorm() <= envelope + slack);
      CHECK((sys.K0() * P * sys.B()).operatorNorm() <= envelope + slack);
      P = A_cl * P;
    }
  }
}

TEST_CASE("compute_stationary_stats ties the pieces together") {
  Rng rng(32, 0);
  const SystemModel sys = oracle::random_stable_system(4, 2, 0.8, rng);
  const double sigma_w = 0.3, sigma_v = 0.2;
  const StationaryStats stats = compute_stationary_stats(sys, sigma_w, sigma_v);

  // Q* solves A_cl Q A_cl^T - Q + sigma_w^2 I + sigma_v^2 B B^T = 0.
  const Eigen::MatrixXd A_cl = sys.closed_loop();
  const Eigen::MatrixXd rhs =
      sigma_w * sigma_w * Eigen::MatrixXd::Identity(4, 4) +
      sigma_v * sigma_v * sys.B() * sys.B().transpose();
  const Eigen::MatrixXd res =
      A_cl * stats.Q_star * A_cl.transpose() - stats.Q_star + rhs;
  CHECK(res.norm() <= 1e-10 * rhs.norm());

  // M* has the documented block layout, bit-for-bit.
  const Eigen::MatrixXd M_expected =
      build_joint_covariance(stats.Q_star, sys.K0(), sigma_v);
  CHECK((stats.M_star - M_expected).lpNorm<Eigen::Infinity>() == 0.0);

  // Numerically PSD and symmetric.
  CHECK((stats.M_star - stats.M_star.transpose()).lpNorm<Eigen::Infinity>() ==
        0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(stats.M_star);
  CHECK(es.eigenvalues().minCoeff() >=
        -1e-10 * stats.M_star.operatorNorm());

  CHECK(stats.C >= 1.0);
  CHECK(stats.rho < 1.0);
  CHECK(stats.rho > spectral_radius(A_cl));
}
