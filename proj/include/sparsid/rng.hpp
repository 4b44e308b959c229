#pragma once

#include <cstdint>

namespace sparsid {

// Counter-based pseudo-random generator (SplitMix64 finalizer over an
// incrementing counter). Every draw is a pure function of (key, counter),
// so replays are bit-exact and streams derived from distinct (seed, stream)
// pairs are independent of each other's consumption.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++ctr_) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so it is
  // safe to feed through log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller. The sine companion is discarded so the
  // generator carries no state beyond the counter.
  double gaussian();

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  // Independent generator for a sub-stream of this one.
  Rng fork(std::uint64_t stream) const { return Rng(key_, stream); }

 private:
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Order-sensitive combine for building per-cell seeds out of coordinates
// like (seed_base, N_g, trial).
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

}  // namespace sparsid
