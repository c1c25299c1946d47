#pragma once

#include <cmath>
#include <cstdint>

namespace urnsim {

// xoshiro256++ (Blackman & Vigna), seeded through SplitMix64 so that any
// 64-bit seed yields a well-mixed state.  Sequences are reproducible bit for
// bit for a given seed within this implementation; no cross-release or
// cross-platform stream stability is promised.
//
// substream(k) derives an independent generator for replica k by running the
// SplitMix64 finalizer over (seed, k).  Substreams of one seed never share
// state with each other or with the parent, so replicas can run in any order
// or in parallel and still reproduce.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = split_mix(x);
  }

  Rng substream(std::uint64_t index) const {
    std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(mix(x));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0, 1), 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1]; never returns 0, safe to pass through log()
  double uniform_open01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // inverse-transform exponential draw with the given rate
  double exponential(double rate) { return -std::log(uniform_open01()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  // SplitMix64 step: advances x and returns the finalized output
  static std::uint64_t split_mix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    return mix(x);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
  std::uint64_t seed_;
};

}  // namespace urnsim
