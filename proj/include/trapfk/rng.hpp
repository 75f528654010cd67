#ifndef TRAPFK_RNG_HPP
#define TRAPFK_RNG_HPP

// Counter-based random numbers. Every stream is a pure function of
// (master_seed, purpose, replica_id); there is no shared generator state, so
// replicas may run on any thread in any order and still reproduce bit for bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace trapfk {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). A keyed bijection on 128-bit counters.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// splitmix64 finalizer; used only to derive keys, never as a stream.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Domain-separation tags. Streams with different tags use different Philox
/// keys and therefore never share output blocks.
enum class StreamPurpose : std::uint32_t {
  environment = 1,
  walk = 2,
  fk = 3,
  bootstrap = 4,
  sampling = 5,
  ctrw = 6,
  reference = 7,
};

constexpr Philox4x32::Key derive_key(std::uint64_t master_seed, std::uint32_t tag) noexcept {
  const std::uint64_t k = mix64(master_seed ^ mix64(0x7472617066ull + tag));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

/// Map 64 random bits to the open interval (0, 1). 52 bits, so the largest
/// value 1 - 2^-53 is still representable below 1.
constexpr double to_unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// A reproducible stream of 64-bit words; satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream() = default;
  CounterStream(std::uint64_t master_seed, std::uint64_t replica_id, StreamPurpose purpose)
      : key_(derive_key(master_seed, static_cast<std::uint32_t>(purpose))),
        replica_(replica_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(replica_), static_cast<std::uint32_t>(replica_ >> 32),
                                  static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)};
    ++block_;
    const auto out = Philox4x32::apply(ctr, key_);
    spare_ = (std::uint64_t{out[3]} << 32) | out[2];
    have_spare_ = true;
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  /// Uniform on (0, 1); never returns 0 or 1.
  double uniform() noexcept { return to_unit_open((*this)()); }

  /// Mean-one exponential.
  double exponential() noexcept { return -std::log(uniform()); }

  /// Standard normal (Box-Muller, one value per two uniforms).
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n) by Lemire's multiply-shift (bias < 2^-32 for small n).
  std::uint32_t below(std::uint32_t n) noexcept {
    const std::uint64_t x = (*this)() >> 32;
    return static_cast<std::uint32_t>((x * n) >> 32);
  }

 private:
  Philox4x32::Key key_{};
  std::uint64_t replica_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// The one entry point for obtaining a stream.
inline CounterStream seed_stream(std::uint64_t master_seed, std::uint64_t replica_id, StreamPurpose purpose) {
  return CounterStream(master_seed, replica_id, purpose);
}

}  // namespace trapfk

#endif  // TRAPFK_RNG_HPP
