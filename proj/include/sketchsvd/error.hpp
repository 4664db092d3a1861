#pragma once

#include <stdexcept>
#include <string>

namespace sketchsvd {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  shape = 2,
  invalid_dimension = 3,
  precondition = 4,
  rank_deficient = 5,
  degenerate_input = 6,
  numerical_failure = 7,
  parse_error = 8,
  unsupported_format = 9,
  io_error = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Numerical failure that still carries the best value reached (e.g. a power
/// iteration that ran out of iterations, or a Jacobi sweep residual).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double estimate)
      : Error(ErrorCode::numerical_failure, what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace sketchsvd
