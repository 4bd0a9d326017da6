#include "sgclt/random.hpp"

#include <bit>

namespace sgclt {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

RandomSource::RandomSource(std::uint64_t seed) : key_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    s += kGolden;
    word = mix64(s);
  }
  // all-zero state is the one fixed point of xoshiro
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

std::uint64_t RandomSource::next() {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomSource::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double RandomSource::uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

RandomSource RandomSource::derive_child(std::uint64_t index) const {
  return RandomSource(mix64(key_ ^ mix64(index + kGolden)) + index);
}

}  // namespace sgclt
