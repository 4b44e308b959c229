#include "sparsid/trajectory.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sparsid/stationary.hpp"

namespace sparsid {

namespace {

constexpr double kStateOverflow = 1e12;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

TrajectoryData simulate_sequence(const SystemModel& sys,
                                 const Eigen::VectorXd& x0,
                                 const Eigen::MatrixXd& w_rows,
                                 const Eigen::MatrixXd& v_rows,
                                 bool retain_noise) {
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const long T = long(w_rows.rows());
  if (x0.size() != n) {
    throw std::invalid_argument("simulate: x0 dimension mismatch");
  }
  if (w_rows.cols() != n || v_rows.cols() != m || v_rows.rows() != T) {
    throw std::invalid_argument("simulate: noise dimension mismatch");
  }

  TrajectoryData traj;
  traj.T = T;
  traj.states.resize(T + 1, n);
  traj.inputs.resize(T, m);
  traj.states.row(0) = x0.transpose();

  Eigen::VectorXd x = x0;
  for (long t = 0; t < T; ++t) {
    const Eigen::VectorXd u = sys.K0() * x + v_rows.row(t).transpose();
    x = sys.A() * x + sys.B() * u + w_rows.row(t).transpose();
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kStateOverflow) {
      throw std::runtime_error("simulate: state magnitude exceeded 1e12 at t=" +
                               std::to_string(t + 1));
    }
    traj.inputs.row(t) = u.transpose();
    traj.states.row(t + 1) = x.transpose();
  }
  if (retain_noise) traj.noise_w = w_rows;
  return traj;
}

Eigen::VectorXd sample_stationary_initial_state(const SystemModel& sys,
                                                const NoiseSpec& w,
                                                const NoiseSpec& v, double tol,
                                                Rng& rng, InitMode mode) {
  const bool both_gaussian = w.family == NoiseFamily::gaussian &&
                             v.family == NoiseFamily::gaussian;
  if (mode == InitMode::exact_gaussian && !both_gaussian) {
    throw std::invalid_argument(
        "stationary init: exact draw requires gaussian noise");
  }
  const bool exact = mode == InitMode::exact_gaussian ||
                     (mode == InitMode::automatic && both_gaussian);
  const Eigen::Index n = sys.n();

  if (exact) {
    const Eigen::MatrixXd rhs =
        w.variance() * Eigen::MatrixXd::Identity(n, n) +
        v.variance() * sys.B() * sys.B().transpose();
    const Eigen::MatrixXd Q = solve_discrete_lyapunov(sys.closed_loop(), rhs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.gaussian();
    // Q may be singular (zero noise); clamp tiny negative eigenvalues.
    return es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * z;
  }

  if (!(tol > 0.0 && tol < 1.0)) {
    throw std::invalid_argument("stationary init: tol must be in (0, 1)");
  }
  const double rho_hat = decay_rate_bound(sys.closed_loop());
  const long T_burn = long(std::ceil(std::log(tol) / std::log(rho_hat)));
  Eigen::MatrixXd w_rows(T_burn, n);
  Eigen::MatrixXd v_rows(T_burn, sys.m());
  for (long t = 0; t < T_burn; ++t) {
    w_rows.row(t) = sample_noise(w, n, rng).transpose();
    v_rows.row(t) = sample_noise(v, sys.m(), rng).transpose();
  }
  const TrajectoryData warmup = simulate_sequence(
      sys, Eigen::VectorXd::Zero(n), w_rows, v_rows, false);
  return warmup.states.row(T_burn).transpose();
}

TrajectoryData simulate_closed_loop(const SystemModel& sys, const NoiseSpec& w,
                                    const NoiseSpec& v, long T,
                                    std::uint64_t seed,
                                    const SimOptions& opts) {
  if (T <= 0) throw std::invalid_argument("simulate: T must be positive");
  Rng init_rng(seed, 0);
  Rng w_rng(seed, 1);
  Rng v_rng(seed, 2);

  const Eigen::VectorXd x0 = sample_stationary_initial_state(
      sys, w, v, opts.init_tol, init_rng, opts.init);

  Eigen::MatrixXd w_rows(T, sys.n());
  Eigen::MatrixXd v_rows(T, sys.m());
  for (long t = 0; t < T; ++t) {
    w_rows.row(t) = sample_noise(w, sys.n(), w_rng).transpose();
    v_rows.row(t) = sample_noise(v, sys.m(), v_rng).transpose();
  }

  TrajectoryData traj =
      simulate_sequence(sys, x0, w_rows, v_rows, opts.retain_noise);
  traj.seed = seed;
  return traj;
}

RegressionData assemble_regression(const SystemModel& sys,
                                   const TrajectoryData& traj) {
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  if (traj.states.cols() != n || traj.inputs.cols() != m ||
      traj.states.rows() != traj.T + 1 || traj.inputs.rows() != traj.T) {
    throw std::invalid_argument("regression: trajectory shape mismatch");
  }
  RegressionData data;
  data.X.resize(traj.T, n + m);
  data.X.leftCols(n) = traj.states.topRows(traj.T);
  data.X.rightCols(m) = traj.inputs;
  data.Y = traj.states.bottomRows(traj.T);
  if (traj.noise_w.rows() == traj.T) data.W = traj.noise_w;
  return data;
}

void write_trajectory_csv(const std::string& path,
                          const TrajectoryData& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const Eigen::Index n = traj.states.cols();
  const Eigen::Index m = traj.inputs.cols();

  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 0; i < m; ++i) out << ",u_" << i;
  out << "\n";

  for (long t = 0; t <= traj.T; ++t) {
    out << t;
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',' << format_double(traj.states(t, i));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      out << ',';
      if (t < traj.T) out << format_double(traj.inputs(t, i));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TrajectoryData read_trajectory_csv(const std::string& path, Eigen::Index n,
                                   Eigen::Index m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trajectory csv: missing header in " + path);
  }
  const auto header = split_csv_line(line);
  if (Eigen::Index(header.size()) != 1 + n + m || header[0] != "t") {
    throw std::runtime_error("trajectory csv: unexpected header in " + path);
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (Eigen::Index(fields.size()) != 1 + n + m) {
      throw std::runtime_error("trajectory csv: ragged row in " + path);
    }
    rows.push_back(std::move(fields));
  }
  if (rows.size() < 2) {
    throw std::runtime_error("trajectory csv: need at least one transition");
  }

  const long T = long(rows.size()) - 1;
  TrajectoryData traj;
  traj.T = T;
  traj.states.resize(T + 1, n);
  traj.inputs.resize(T, m);
  for (long t = 0; t <= T; ++t) {
    const auto& f = rows[size_t(t)];
    if (std::stol(f[0]) != t) {
      throw std::runtime_error("trajectory csv: non-sequential t column");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      traj.states(t, i) = std::stod(f[size_t(1 + i)]);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::string& cell = f[size_t(1 + n + i)];
      if (t < T) {
        traj.inputs(t, i) = std::stod(cell);
      } else if (!cell.empty()) {
        throw std::runtime_error("trajectory csv: final row must leave u empty");
      }
    }
  }
  return traj;
}

}  // namespace sparsid
