#include "sparsid/powergrid.hpp"

#include <stdexcept>
#include <string>

namespace sparsid {

GridTopology random_tree(long N_g, long max_degree, Rng& rng) {
  if (N_g < 2) throw std::invalid_argument("random tree: N_g must be >= 2");
  if (max_degree < 2) {
    throw std::invalid_argument("random tree: max_degree must be >= 2");
  }
  GridTopology topo;
  topo.N_g = N_g;
  topo.degrees.assign(size_t(N_g), 0);
  std::vector<long> open = {0};  // existing nodes with residual capacity
  for (long i = 1; i < N_g; ++i) {
    const size_t pick = size_t(rng.uniform_int(0, int(open.size()) - 1));
    const long parent = open[pick];
    topo.edges.emplace_back(parent, i);
    if (++topo.degrees[size_t(parent)] >= max_degree) {
      open[pick] = open.back();
      open.pop_back();
    }
    topo.degrees[size_t(i)] = 1;
    open.push_back(i);
  }
  return topo;
}

GridParams sample_grid_params(const GridTopology& topo, Rng& rng) {
  GridParams p;
  p.susceptance.reserve(topo.edges.size());
  for (size_t e = 0; e < topo.edges.size(); ++e) {
    p.susceptance.push_back(rng.uniform(0.5, 1.0));
  }
  p.inertia.reserve(size_t(topo.N_g));
  for (long i = 0; i < topo.N_g; ++i) p.inertia.push_back(rng.uniform(1.0, 2.0));
  p.damping.reserve(size_t(topo.N_g));
  for (long i = 0; i < topo.N_g; ++i) {
    p.damping.push_back(rng.uniform(0.5, 1.5));
  }
  return p;
}

SystemModel build_swing_system(const GridTopology& topo,
                               const GridParams& params) {
  const long N_g = topo.N_g;
  if (N_g < 1) throw std::invalid_argument("swing system: empty topology");
  if (params.susceptance.size() != topo.edges.size() ||
      long(params.inertia.size()) != N_g ||
      long(params.damping.size()) != N_g) {
    throw std::invalid_argument("swing system: parameter count mismatch");
  }
  if (params.dt <= 0.0) {
    throw std::invalid_argument("swing system: dt must be positive");
  }

  const double dt = params.dt;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * N_g, 2 * N_g);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * N_g, N_g);

  std::vector<double> coupling(size_t(N_g), 0.0);  // sum_j B_ij per generator
  for (size_t e = 0; e < topo.edges.size(); ++e) {
    const auto [i, j] = topo.edges[e];
    coupling[size_t(i)] += params.susceptance[e];
    coupling[size_t(j)] += params.susceptance[e];
  }

  for (long i = 0; i < N_g; ++i) {
    const double M = params.inertia[size_t(i)];
    const double D = params.damping[size_t(i)];
    A(2 * i, 2 * i) = 1.0;
    A(2 * i, 2 * i + 1) = dt;
    A(2 * i + 1, 2 * i) = -(coupling[size_t(i)] / M) * dt;
    A(2 * i + 1, 2 * i + 1) = 1.0 - (D / M) * dt;
    B(2 * i + 1, i) = 1.0;
  }
  for (size_t e = 0; e < topo.edges.size(); ++e) {
    const auto [i, j] = topo.edges[e];
    const double b = params.susceptance[e];
    A(2 * i + 1, 2 * j) = (b / params.inertia[size_t(i)]) * dt;
    A(2 * j + 1, 2 * i) = (b / params.inertia[size_t(j)]) * dt;
  }
  return SystemModel(A, B, default_feedback(N_g));
}

Eigen::MatrixXd default_feedback(long N_g) {
  if (N_g < 1) throw std::invalid_argument("feedback: N_g must be >= 1");
  Eigen::MatrixXd K0 = Eigen::MatrixXd::Zero(N_g, 2 * N_g);
  for (long i = 0; i < N_g; ++i) {
    K0(i, 2 * i) = -0.1;
    K0(i, 2 * i + 1) = -0.1;
  }
  return K0;
}

std::pair<NoiseSpec, NoiseSpec> default_noise() {
  return {NoiseSpec::gaussian(0.1), NoiseSpec::gaussian(std::sqrt(0.05))};
}

GridInstance sample_grid_instance(long N_g, std::uint64_t seed,
                                  long max_degree, long max_attempts) {
  for (long attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(seed, std::uint64_t(attempt));
    GridTopology topo = random_tree(N_g, max_degree, rng);
    GridParams params = sample_grid_params(topo, rng);
    try {
      SystemModel sys = build_swing_system(topo, params);
      return GridInstance{std::move(sys), std::move(topo), std::move(params),
                          attempt, seed};
    } catch (const std::invalid_argument&) {
      // Closed loop unstable for this draw; try the next substream.
    }
  }
  throw std::runtime_error("grid instance: no stable draw for seed " +
                           std::to_string(seed) + " after " +
                           std::to_string(max_attempts) + " attempts");
}

}  // namespace sparsid
