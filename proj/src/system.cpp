#include "sparsid/system.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sparsid {

double spectral_radius(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("spectral_radius: matrix must be square");
  }
  if (M.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SystemModel::SystemModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                         Eigen::MatrixXd K0)
    : A_(std::move(A)), B_(std::move(B)), K0_(std::move(K0)) {
  if (A_.rows() < 1 || A_.rows() != A_.cols()) {
    throw std::invalid_argument("SystemModel: A must be square and nonempty");
  }
  if (B_.rows() != A_.rows() || B_.cols() < 1) {
    throw std::invalid_argument("SystemModel: B must be n x m with m >= 1");
  }
  if (K0_.rows() != B_.cols() || K0_.cols() != A_.rows()) {
    throw std::invalid_argument("SystemModel: K0 must be m x n");
  }
  double sr = spectral_radius(closed_loop());
  if (!(sr < 1.0)) {
    throw std::invalid_argument(
        "SystemModel: closed loop A + B*K0 is not Schur stable "
        "(spectral radius " + std::to_string(sr) + ")");
  }
}

Eigen::MatrixXd SystemModel::psi_star() const {
  Eigen::MatrixXd psi(n() + m(), n());
  psi.topRows(n()) = A_.transpose();
  psi.bottomRows(m()) = B_.transpose();
  return psi;
}

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& arr, int rows, int cols,
                                 const std::string& name) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols) {
    throw std::runtime_error("system json: field '" + name + "' must be a " +
                             std::to_string(rows) + "x" + std::to_string(cols) +
                             " row-major array");
  }
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = arr[i * cols + j].get<double>();
  return M;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) arr.push_back(M(i, j));
  return arr;
}

}  // namespace

SystemModel read_system_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system file: " + path);
  nlohmann::json j;
  in >> j;
  int n = j.at("n").get<int>();
  int m = j.at("m").get<int>();
  return SystemModel(matrix_from_json(j.at("A"), n, n, "A"),
                     matrix_from_json(j.at("B"), n, m, "B"),
                     matrix_from_json(j.at("K0"), m, n, "K0"));
}

void write_system_json(const std::string& path, const SystemModel& sys,
                       const std::string& metadata_json) {
  nlohmann::json j;
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["A"] = matrix_to_json(sys.A());
  j["B"] = matrix_to_json(sys.B());
  j["K0"] = matrix_to_json(sys.K0());
  if (!metadata_json.empty()) j["meta"] = nlohmann::json::parse(metadata_json);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write system file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace sparsid
