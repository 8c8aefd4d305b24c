#pragma once

#include <stdexcept>
#include <string>

namespace sbcim {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  parse,
  validation,
  io,
  too_large,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sbcim
