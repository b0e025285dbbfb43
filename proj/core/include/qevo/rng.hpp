#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qevo {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A generator is identified by a 64-bit key (the seed) and a 64-bit stream
/// id; the remaining 64 counter bits index blocks within the stream, so any
/// (seed, stream) pair yields an independent, platform-stable sequence.
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// +1 or -1 with equal probability.
  int rademacher() noexcept;

  /// Independent generator sharing this seed.
  Philox substream(std::uint64_t stream) const noexcept { return Philox(seed_, stream); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Raw block function: ten rounds over `counter` under `key`.
  static Block generate(Block counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  Block buffer_{};
  int available_ = 0;
};

/// SplitMix64 finaliser; used to derive child seeds from (seed, label) pairs.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace qevo
