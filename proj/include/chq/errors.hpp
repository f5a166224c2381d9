// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_ERRORS_HPP
#define CHQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chq {

enum class ErrorCode {
  invalid_argument = 1,
  solver_failure = 2,
  unsupported = 3,
  io_failure = 4,
  domain_exceeded = 5,
  diagonal_singularity = 6,
  degenerate_direction = 7,
  critical_exponent = 8,
  resolution = 9,
};

/// Library-wide exception carrying a coarse error code for the C layer.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace chq

#endif
