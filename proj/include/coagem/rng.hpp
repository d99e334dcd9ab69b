#pragma once

#include <cstdint>
#include <limits>

namespace coagem {

/// Counter-based 64-bit generator (splitmix64 stream): the k-th output is a
/// fixed mix of seed + k * golden gamma, so identical seeds reproduce
/// identical streams on every platform and the state is a single counter.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, n), n >= 1.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = (*this)();
      r = x % n;
    } while (x - r > std::numeric_limits<std::uint64_t>::max() - (n - 1));
    return r;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace coagem
