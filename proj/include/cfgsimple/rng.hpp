// rng.hpp - seeded random streams.
//
// Every random draw in the library comes from a Xoshiro256ss engine keyed by
// (seed, domain, index). The key is hashed with splitmix64 into the 256-bit
// state, so streams for different replicates are independent and a result
// depends only on the seed and the replicate index, never on thread count.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cfgsimple {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream domains. Each experiment component draws from its own domain so
/// that, e.g., raw and split sequences in a comparison never share streams.
enum class Domain : std::uint64_t {
  Pairing = 1,
  Surrogate = 2,
  Bootstrap = 3,
  Rejection = 4,
  Auxiliary = 5,
};

/// xoshiro256** (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed = 0) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  /// Engine for replicate `index` of `domain` under the run seed `seed`.
  static Xoshiro256ss stream(std::uint64_t seed, Domain domain, std::uint64_t index) noexcept {
    std::uint64_t a = seed;
    std::uint64_t key = splitmix64(a);
    std::uint64_t b = key ^ (static_cast<std::uint64_t>(domain) * 0xD1B54A32D192ED03ULL);
    key = splitmix64(b);
    std::uint64_t c = key ^ index;
    return Xoshiro256ss(splitmix64(c));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cfgsimple
