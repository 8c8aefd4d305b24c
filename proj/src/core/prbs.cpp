#include "core/prbs.hpp"

#include <bit>

#include "core/error.hpp"

namespace sbcim {

namespace {

// Feedback masks for the right-shift Fibonacci form: the bit shifted in at
// the top is the XOR parity of (state & mask). Entries derive from the
// standard maximal-length polynomial table, e.g. width 16 uses
// x^16 + x^14 + x^13 + x^11 + 1.
uint32_t taps_for(uint32_t width) {
  switch (width) {
    case 16: return 0x0000002Du;  // 16,14,13,11
    case 20: return 0x00000009u;  // 20,17
    case 24: return 0x00000087u;  // 24,23,22,17
    case 31: return 0x00000009u;  // 31,28
    case 32: return 0xC0000401u;  // 32,22,2,1
    default: return 0;
  }
}

}  // namespace

bool PrbsState::supported_width(uint32_t width) { return taps_for(width) != 0; }

PrbsState::PrbsState(uint32_t width, uint64_t seed) : width_(width) {
  taps_ = taps_for(width);
  if (taps_ == 0)
    fail(ErrorCode::invalid_argument,
         "unsupported PRBS width " + std::to_string(width) +
             " (supported: 16, 20, 24, 31, 32)");
  mask_ = width == 32 ? 0xFFFFFFFFu : ((uint32_t(1) << width) - 1);
  state_ = uint32_t(seed) & mask_;
  if (state_ == 0) state_ = uint32_t(seed >> 32) & mask_;
  if (state_ == 0) state_ = 1;
}

int PrbsState::bit() {
  int out = int(state_ & 1);
  uint32_t feedback = uint32_t(std::popcount(state_ & taps_) & 1);
  state_ = (state_ >> 1) | (feedback << (width_ - 1));
  return out;
}

}  // namespace sbcim
