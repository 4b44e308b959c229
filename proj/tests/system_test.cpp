#include <Eigen/Dense>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "sparsid/rng.hpp"
#include "sparsid/system.hpp"

using namespace sparsid;

TEST_CASE("spectral_radius") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 0.5;
  D(1, 1) = -0.3;
  CHECK(spectral_radius(D) == doctest::Approx(0.5).epsilon(1e-12));

  // Rotation by 90 degrees scaled by 0.7: complex pair of modulus 0.7.
  Eigen::MatrixXd R(2, 2);
  R << 0.0, -0.7, 0.7, 0.0;
  CHECK(spectral_radius(R) == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)));
}

TEST_CASE("SystemModel construction checks") {
  const Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Ones(2, 1);
  const Eigen::MatrixXd K0 = Eigen::MatrixXd::Zero(1, 2);

  SUBCASE("valid system accepted") {
    SystemModel sys(A, B, K0);
    CHECK(sys.n() == 2);
    CHECK(sys.m() == 1);
    CHECK((sys.closed_loop() - A).norm() == 0.0);
  }

  SUBCASE("dimension mismatches rejected") {
    CHECK_THROWS(SystemModel(Eigen::MatrixXd::Zero(2, 3), B, K0));
    CHECK_THROWS(SystemModel(A, Eigen::MatrixXd::Ones(3, 1), K0));
    CHECK_THROWS(SystemModel(A, B, Eigen::MatrixXd::Zero(2, 2)));
  }

  SUBCASE("closed-loop instability rejected") {
    CHECK_THROWS(SystemModel(1.1 * Eigen::MatrixXd::Identity(2, 2), B, K0));
    // A alone unstable but B K0 stabilizes: accepted.
    Eigen::MatrixXd K_stab(1, 2);
    K_stab << -0.8, 0.0;
    Eigen::MatrixXd A_unstable = Eigen::MatrixXd::Zero(2, 2);
    A_unstable(0, 0) = 1.05;
    A_unstable(1, 1) = 0.2;
    Eigen::MatrixXd B2(2, 1);
    B2 << 1.0, 0.0;
    SystemModel sys(A_unstable, B2, K_stab);
    CHECK(spectral_radius(sys.closed_loop()) < 1.0);
  }
}

TEST_CASE("psi_star stacks A and B transposed") {
  Eigen::MatrixXd A(2, 2);
  A << 0.1, 0.2, 0.3, 0.4;
  Eigen::MatrixXd B(2, 1);
  B << 5.0, 6.0;
  SystemModel sys(A, B, Eigen::MatrixXd::Zero(1, 2));

  const Eigen::MatrixXd psi = sys.psi_star();
  CHECK(psi.rows() == 3);
  CHECK(psi.cols() == 2);
  CHECK((psi.topRows(2) - A.transpose()).norm() == 0.0);
  CHECK((psi.bottomRows(1) - B.transpose()).norm() == 0.0);
}

TEST_CASE("system JSON round trip") {
  Rng rng(99, 0);
  Eigen::MatrixXd A(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = 0.3 * rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd B(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) B(i, j) = rng.uniform(-1.0, 1.0);
  const Eigen::MatrixXd K0 = Eigen::MatrixXd::Zero(2, 2);
  SystemModel sys(A, B, K0);

  const std::string path = "system_roundtrip_test.json";
  write_system_json(path, sys, R"({"origin":"unit-test"})");
  const SystemModel back = read_system_json(path);
  std::remove(path.c_str());

  CHECK((back.A() - sys.A()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.B() - sys.B()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.K0() - sys.K0()).lpNorm<Eigen::Infinity>() == 0.0);

  CHECK_THROWS(read_system_json("does_not_exist.json"));
}
