#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "sparsid/noise.hpp"
#include "sparsid/rng.hpp"
#include "sparsid/system.hpp"

namespace sparsid {

/**
 * One closed-loop rollout of length T:
 *   x(t+1) = A x(t) + B u(t) + w(t),  u(t) = K0 x(t) + v(t).
 *
 * states holds x(0..T) (T+1 rows), inputs holds u(0..T-1). noise_w is kept
 * only when requested and is empty (0 rows) otherwise.
 */
struct TrajectoryData {
  Eigen::MatrixXd states;   // (T+1) x n
  Eigen::MatrixXd inputs;   // T x n_u
  Eigen::MatrixXd noise_w;  // T x n when retained, else 0 x 0
  long T = 0;
  std::uint64_t seed = 0;
};

// Regression form of a trajectory: row t of X is [x(t)^T u(t)^T], row t of Y
// is x(t+1)^T, so Y = X Psi + W with Psi = [A B]^T.
struct RegressionData {
  Eigen::MatrixXd X;  // T x (n+m)
  Eigen::MatrixXd Y;  // T x n
  Eigen::MatrixXd W;  // T x n when the trajectory retained noise, else 0 x 0
};

enum class InitMode {
  automatic,       // exact stationary draw for gaussian noise, burn-in otherwise
  burn_in,         // always run a discarded warm-up rollout
  exact_gaussian,  // always draw x0 ~ N(0, Q*); requires gaussian w and v
};

struct SimOptions {
  bool retain_noise = false;
  InitMode init = InitMode::automatic;
  double init_tol = 1e-8;  // burn-in length covers rho^T_burn <= init_tol
};

// Deterministic core: rolls the closed loop forward from x0 with the given
// process-noise rows w (T x n) and excitation rows v (T x m). Throws if any
// state magnitude exceeds 1e12.
TrajectoryData simulate_sequence(const SystemModel& sys,
                                 const Eigen::VectorXd& x0,
                                 const Eigen::MatrixXd& w_rows,
                                 const Eigen::MatrixXd& v_rows,
                                 bool retain_noise = false);

// Draws x(0) from (approximately) the stationary distribution. Gaussian noise
// admits an exact draw x0 = L z with L L^T = Q*; other families fall back to a
// burn-in rollout of length ceil(log(tol) / log(rho_hat)).
Eigen::VectorXd sample_stationary_initial_state(const SystemModel& sys,
                                                const NoiseSpec& w,
                                                const NoiseSpec& v, double tol,
                                                Rng& rng,
                                                InitMode mode = InitMode::automatic);

// Samples noise and rolls out T steps from a stationary initial state.
// Reproducible: the same (sys, w, v, T, seed) always yields the same data, and
// extending T keeps the shared prefix because noise streams are counter-based.
TrajectoryData simulate_closed_loop(const SystemModel& sys, const NoiseSpec& w,
                                    const NoiseSpec& v, long T,
                                    std::uint64_t seed,
                                    const SimOptions& opts = {});

RegressionData assemble_regression(const SystemModel& sys,
                                   const TrajectoryData& traj);

// CSV round trip. Header is t,x_0..x_{n-1},u_0..u_{m-1}; the final row (t = T)
// carries the terminal state with empty input cells.
void write_trajectory_csv(const std::string& path, const TrajectoryData& traj);
TrajectoryData read_trajectory_csv(const std::string& path, Eigen::Index n,
                                   Eigen::Index m);

}  // namespace sparsid
