#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace sgclt {

/// Seedable xoshiro256** stream (period 2^256 - 1), seeded through SplitMix64.
///
/// Output is bit-exact across platforms: no std:: distributions are used
/// anywhere downstream. Children are keyed substreams: derive_child(i) depends
/// only on (this stream's key, i), never on how many values were drawn, so
/// per-process streams are stable under any scheduling.
///
/// Single owner. Give each worker its own child.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view generator_id = "xoshiro256**/splitmix64-keyed";

  explicit RandomSource(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1); the endpoints are unreachable.
  double uniform_open();

  RandomSource derive_child(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_{};
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sgclt
