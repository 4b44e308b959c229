#pragma once

#include <Eigen/Core>
#include <string>

namespace sparsid {

double spectral_radius(const Eigen::MatrixXd& M);

// Discrete-time plant x(t+1) = A x(t) + B u(t) + w(t) together with the
// static feedback K0 that closes the loop through u(t) = K0 x(t) + v(t).
// Construction validates dimensions and closed-loop stability.
class SystemModel {
 public:
  SystemModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd K0);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& K0() const { return K0_; }
  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }

  Eigen::MatrixXd closed_loop() const { return A_ + B_ * K0_; }

  // True regression parameter [A B]^T, shape (n+m) x n.
  Eigen::MatrixXd psi_star() const;

 private:
  Eigen::MatrixXd A_, B_, K0_;
};

// JSON system file: object with fields n, m, A (row-major), B, K0.
SystemModel read_system_json(const std::string& path);
void write_system_json(const std::string& path, const SystemModel& sys,
                       const std::string& metadata_json = "");

}  // namespace sparsid
