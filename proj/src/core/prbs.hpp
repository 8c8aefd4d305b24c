#pragma once

#include <cstdint>

#include "core/rng.hpp"

namespace sbcim {

// Fibonacci LFSR with maximal-length taps. The output stream is the bit
// shifted out each step; a width-w register never reaches all-zeros and
// cycles through every nonzero state (period 2^w - 1).
class PrbsState final : public BitSource {
public:
  // Widths with a tap entry: 16, 20, 24, 31, 32.
  PrbsState(uint32_t width, uint64_t seed);

  static bool supported_width(uint32_t width);

  uint32_t width() const { return width_; }
  uint32_t state() const { return state_; }
  uint32_t taps() const { return taps_; }

  int bit() override;

  int next_bit() { return bit(); }
  uint32_t next_bits(unsigned n) { return bits(n); }

private:
  uint32_t width_ = 0;
  uint32_t taps_ = 0;
  uint32_t mask_ = 0;
  uint32_t state_ = 1;
};

}  // namespace sbcim
