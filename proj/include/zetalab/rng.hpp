#pragma once

#include <cstdint>

namespace zetalab {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter, lane), so Monte Carlo runs reproduce bit-for-bit
// regardless of how samples are distributed over worker threads.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x243f6a8885a308d3ULL) ^ mix(stream + 0x13198a2e03707344ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t counter, std::uint64_t lane = 0) const {
    std::uint64_t x = key_ ^ mix(counter * 0x9e3779b97f4a7c15ULL + 0xa4093822299f31d0ULL);
    x = mix(x + lane * 0xd1b54a32d192ed03ULL);
    return mix(x ^ key_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter, std::uint64_t lane = 0) const {
    return static_cast<double>(bits(counter, lane) >> 11) * 0x1.0p-53;
  }

  constexpr CounterRng substream(std::uint64_t stream) const {
    CounterRng r(0, 0);
    r.key_ = mix(key_ ^ mix(stream + 0x082efa98ec4e6c89ULL));
    return r;
  }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace zetalab
