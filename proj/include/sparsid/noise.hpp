#pragma once

#include <Eigen/Core>

#include "sparsid/rng.hpp"

namespace sparsid {

enum class NoiseFamily { gaussian, uniform_bounded, rademacher };

// Centered sub-Gaussian noise law. `scale` is the standard deviation for
// gaussian, the half-width for uniform on [-a, a], and the magnitude for
// rademacher (+/- a). scale = 0 degenerates to the point mass at zero.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double scale = 0.0;

  static NoiseSpec gaussian(double sigma);
  static NoiseSpec uniform(double half_width);
  static NoiseSpec rademacher(double magnitude);

  double variance() const;

  // Sub-Gaussian parameter b of the moment-generating-function bound.
  double sub_gaussian_b() const;

  // Sub-Gaussian norm: smallest r with E{x^2 / r^2} <= 2, i.e. sqrt(var/2).
  double psi_norm() const;
};

// Smallest eta with max{ ||w||_psi, ||v||_psi } <= eta.
double eta_bound(const NoiseSpec& w_spec, const NoiseSpec& v_spec);

// dim i.i.d. coordinates from the given law.
Eigen::VectorXd sample_noise(const NoiseSpec& spec, int dim, Rng& rng);

}  // namespace sparsid
