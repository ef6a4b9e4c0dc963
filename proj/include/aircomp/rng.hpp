#pragma once

#include <cstdint>
#include <random>

namespace aircomp {

/// Mixes a 64-bit word (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based stream derivation: a child seed depends only on the parent
/// seed and the counter, so streams can be created in any order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter) noexcept;

/// Seeded random stream.
///
/// The engine is std::mt19937_64 (output fully specified by the standard);
/// the distribution transforms below are implemented here rather than taken
/// from <random>, whose distributions are implementation-defined. Identical
/// seeds therefore yield identical draws on every conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via the Marsaglia polar method.
  double gaussian();

  /// Uniform on {-1, +1}, one engine word per 64 signs.
  double sign() {
    if (sign_bits_left_ == 0) {
      sign_bits_ = engine_();
      sign_bits_left_ = 64;
    }
    const bool bit = (sign_bits_ & 1U) != 0;
    sign_bits_ >>= 1;
    --sign_bits_left_;
    return bit ? 1.0 : -1.0;
  }

  /// Independent child stream; advances this stream by one word.
  Rng split() { return Rng(mix64(engine_())); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t sign_bits_ = 0;
  int sign_bits_left_ = 0;
};

}  // namespace aircomp
