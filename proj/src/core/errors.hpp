#pragma once

#include <stdexcept>
#include <string>

namespace phicgc {

// Mirrors phicgc_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNumericalRange = 3,
  kNoProgress = 4,
  kBudgetExceeded = 5,
  kEstimatorUnavailable = 6,
  kIo = 7,
  kConfig = 8,
  kUnsupported = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace phicgc
