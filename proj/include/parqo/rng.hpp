#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace parqo {

/// SplitMix64 output mix (Steele/Lea/Flood). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

/// Derives the seed of an independent substream from (seed, trial, purpose).
/// Every Monte-Carlo trial draws its channels, symbols, and system matrices
/// from its own streams, so results do not depend on execution order or on
/// the number of workers.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t trial,
                                        std::string_view purpose) {
  std::uint64_t h = mix64(seed + kGolden64);
  h = mix64(h ^ (trial + kGolden64));
  for (unsigned char c : purpose) h = mix64(h ^ c);
  return h;
}

/// Counter-based generator: the state advances by a fixed odd increment and
/// each output is mix64 of the counter (SplitMix64). Deterministic across
/// platforms, cheap to seed, and streams with distinct seeds are unrelated.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t stream_seed) : state_(stream_seed) {}

  std::uint64_t next_u64() noexcept { return mix64(state_ += kGolden64); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) via rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Circularly-symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_gaussian() noexcept {
    const double re = gaussian();
    const double im = gaussian();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace parqo
