#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "sparsid/noise.hpp"
#include "sparsid/rng.hpp"
#include "sparsid/system.hpp"

namespace sparsid {

// Undirected spanning tree over the generators; |edges| = N_g - 1.
struct GridTopology {
  long N_g = 0;
  std::vector<std::pair<long, long>> edges;
  std::vector<long> degrees;
};

struct GridParams {
  std::vector<double> susceptance;  // per edge, in [0.5, 1]
  std::vector<double> inertia;      // per generator, in [1, 2]
  std::vector<double> damping;      // per generator, in [0.5, 1.5]
  double dt = 0.1;
};

/**
 * Degree-capped uniform attachment: node i (i >= 1) connects to a node chosen
 * uniformly among existing nodes whose degree is still below max_degree.
 * Always yields a connected acyclic graph.
 */
GridTopology random_tree(long N_g, long max_degree, Rng& rng);

// Susceptances, inertias, dampings drawn uniformly from their intervals, in
// edge order then generator order.
GridParams sample_grid_params(const GridTopology& topo, Rng& rng);

/**
 * Discretized swing dynamics: per generator the state is (angle, frequency),
 * so n = 2 N_g and m = N_g. Diagonal blocks
 *   A_ii = [[1, dt], [-(sum_j B_ij / M_i) dt, 1 - (D_i / M_i) dt]],
 * neighbor blocks A_ij = [[0, 0], [(B_ij / M_i) dt, 0]], input blocks
 * B_ii = [0, 1]^T, under the default feedback. Throws when the sampled
 * instance is closed-loop unstable.
 */
SystemModel build_swing_system(const GridTopology& topo,
                               const GridParams& params);

// Block-diagonal K0 with per-generator row [-0.1, -0.1] acting on
// (angle, frequency).
Eigen::MatrixXd default_feedback(long N_g);

// w: gaussian per-coordinate variance 0.01; v: gaussian variance 0.05.
std::pair<NoiseSpec, NoiseSpec> default_noise();

struct GridInstance {
  SystemModel system;
  GridTopology topology;
  GridParams params;
  long resamples = 0;  // instances discarded for closed-loop instability
  std::uint64_t seed = 0;
};

// Samples (topology, params) until the closed loop is stable, counting the
// discarded draws. Throws after max_attempts failures.
GridInstance sample_grid_instance(long N_g, std::uint64_t seed,
                                  long max_degree = 10,
                                  long max_attempts = 100);

}  // namespace sparsid
