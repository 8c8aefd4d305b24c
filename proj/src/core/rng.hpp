#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace sbcim {

// All randomness in the library flows through these generators rather than
// <random> distributions, whose output is implementation-defined. Identical
// seeds must give identical streams on every platform.

struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Derives the seed of an independent child stream. Used for per-trial,
// per-restart and per-rounding streams so that parallel and serial
// execution consume identical randomness.
inline uint64_t split_seed(uint64_t base, uint64_t index) {
  SplitMix64 sm(base ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  uint64_t a = sm.next();
  return a ^ std::rotl(sm.next(), 17);
}

class Xoshiro256ss {
public:
  explicit Xoshiro256ss(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  uint64_t next() {
    const uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound). Lemire's method.
  uint32_t below(uint32_t bound) {
    uint64_t x = next() >> 32;
    uint64_t m = x * bound;
    auto lo = uint32_t(m);
    if (lo < bound) {
      uint32_t threshold = (0u - bound) % bound;
      while (lo < threshold) {
        x = next() >> 32;
        m = x * bound;
        lo = uint32_t(m);
      }
    }
    return uint32_t(m >> 32);
  }

  int8_t spin() { return (next() >> 63) ? int8_t(1) : int8_t(-1); }

  // Standard normal via Marsaglia's polar method.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

private:
  uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Bit-level source shared by the ideal engine's noise sampler and the
// hardware PRBS path, so the two can consume an identical stream in
// lockstep tests.
class BitSource {
public:
  virtual ~BitSource() = default;

  virtual int bit() = 0;

  // MSB-first accumulation of n successive bits.
  uint32_t bits(unsigned n) {
    uint32_t v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | uint32_t(bit());
    return v;
  }

  // Uniform index in [0, levels); power-of-two level counts consume
  // exactly log2(levels) bits.
  uint32_t uniform_levels(uint32_t levels) {
    if (levels <= 1) return 0;
    unsigned width = unsigned(std::bit_width(levels - 1));
    for (;;) {
      uint32_t v = bits(width);
      if (v < levels) return v;
    }
  }
};

class XoshiroBits final : public BitSource {
public:
  explicit XoshiroBits(uint64_t seed) : rng_(seed) {}

  int bit() override { return int(rng_.next() >> 63); }

private:
  Xoshiro256ss rng_;
};

}  // namespace sbcim
