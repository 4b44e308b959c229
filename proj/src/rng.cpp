#include "sparsid/rng.hpp"

#include <cmath>
#include <numbers>

namespace sparsid {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::derive_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^
               mix64(stream + 0xD1B54A32D192ED03ull));
}

double Rng::gaussian() {
  double u1 = uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int lo, int hi) {
  // Lemire's multiply-shift; range is small enough that the residual bias
  // of the plain product is already below 2^-32, rejection omitted.
  std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  __uint128_t prod = static_cast<__uint128_t>(next_u64()) * range;
  return lo + static_cast<int>(prod >> 64);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
}

}  // namespace sparsid
