#include "sparsid/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsid {

namespace {

void validate_scale(double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("NoiseSpec: scale must be finite and >= 0");
  }
}

}  // namespace

NoiseSpec NoiseSpec::gaussian(double sigma) {
  validate_scale(sigma);
  return {NoiseFamily::gaussian, sigma};
}

NoiseSpec NoiseSpec::uniform(double half_width) {
  validate_scale(half_width);
  return {NoiseFamily::uniform_bounded, half_width};
}

NoiseSpec NoiseSpec::rademacher(double magnitude) {
  validate_scale(magnitude);
  return {NoiseFamily::rademacher, magnitude};
}

double NoiseSpec::variance() const {
  switch (family) {
    case NoiseFamily::gaussian:
      return scale * scale;
    case NoiseFamily::uniform_bounded:
      return scale * scale / 3.0;
    case NoiseFamily::rademacher:
      return scale * scale;
  }
  return 0.0;
}

double NoiseSpec::sub_gaussian_b() const { return scale; }

double NoiseSpec::psi_norm() const { return std::sqrt(variance() / 2.0); }

double eta_bound(const NoiseSpec& w_spec, const NoiseSpec& v_spec) {
  return std::max(w_spec.psi_norm(), v_spec.psi_norm());
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec, int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sample_noise: dim must be >= 1");
  Eigen::VectorXd out(dim);
  switch (spec.family) {
    case NoiseFamily::gaussian:
      for (int i = 0; i < dim; ++i) out[i] = spec.scale * rng.gaussian();
      break;
    case NoiseFamily::uniform_bounded:
      for (int i = 0; i < dim; ++i)
        out[i] = rng.uniform(-spec.scale, spec.scale);
      break;
    case NoiseFamily::rademacher:
      for (int i = 0; i < dim; ++i)
        out[i] = (rng.next_u64() & 1u) ? spec.scale : -spec.scale;
      break;
  }
  return out;
}

}  // namespace sparsid
