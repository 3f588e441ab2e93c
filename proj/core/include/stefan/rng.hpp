#pragma once

#include <cstdint>

#include "stefan/dense.hpp"

namespace stefan {

inline constexpr std::uint64_t kDefaultSeed = 0x5DEECE66DULL;

/// xorshift64* generator. Update rule, reproducible in any language:
///   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; out = x * 0x2545F4914F6CDD1D
/// State is the seed (0 maps to kDefaultSeed). Doubles use the top 53 bits:
///   u = (out >> 11) * 2^-53, in [0, 1).
class Xorshift64Star {
 public:
  using result_type = std::uint64_t;

  explicit Xorshift64Star(std::uint64_t seed = kDefaultSeed) noexcept
      : state_(seed == 0 ? kDefaultSeed : seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    return lo + (*this)() % (hi - lo + 1);
  }

 private:
  std::uint64_t state_;
};

/// Uniform point of the unit simplex (normalised exponential spacings).
Vector sample_simplex(Xorshift64Star& rng, std::size_t n);

/// Simplex point that with probability 1/5 sits exactly on a face (a random
/// nonempty proper subset of entries zeroed) and with probability 1/10 has
/// entries pushed to ~1e-9 of the others; otherwise uniform.
Vector sample_simplex_with_vertices(Xorshift64Star& rng, std::size_t n);

/// Uniform point of {c in simplex : c_i >= floor}; needs n * floor < 1.
Vector sample_simplex_floored(Xorshift64Star& rng, std::size_t n, double floor);

/// Random zero-sum vector with entries of order one.
Vector sample_zero_sum(Xorshift64Star& rng, std::size_t n);

/// Standard normal via Box-Muller.
double sample_normal(Xorshift64Star& rng);

}  // namespace stefan
