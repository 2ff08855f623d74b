#pragma once

#include <cmath>
#include <cstdint>

namespace crowdsim {

/// Seed for a deterministic simulation stream. Equal seeds with equal
/// configuration reproduce runs byte for byte.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream seed; used to give every node, worker and
/// item its own reproducible randomness without consuming the parent stream.
inline RngSeed derive(RngSeed base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = base.value ^ (0xD1B54A32D192ED03ULL * (a + 1));
  s ^= 0x8CB92BA72F3D8DD7ULL * (b + 1);
  return RngSeed{detail::splitmix64(s)};
}

/// Small deterministic generator (splitmix64). Not cryptographic; chosen for
/// cross-run reproducibility of the simulation trace.
class Rng {
 public:
  explicit Rng(RngSeed seed) : state_(seed.value) {}

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  /// Uniform index in [0, n).
  std::size_t pick(std::size_t n) { return next_u64() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  /// -1 or +1 with equal probability.
  int sign() { return (next_u64() & 1) ? 1 : -1; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace crowdsim
