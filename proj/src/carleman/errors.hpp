#pragma once

#include <stdexcept>
#include <string>

namespace carleman {

enum class ErrorCode {
  CONFIG_ERROR,
  X0_INSIDE,
  NONPOSITIVE_N,
  BAD_D,
  GRID_TOO_SMALL,
  CFL_VIOLATION,
  INVARIANT_FAIL,
  NO_EXTERIOR_NODES,
  TOO_FEW_SAMPLES,
  LAYER_TOO_WIDE,
  TRACE_SHAPE_MISMATCH,
  SINGULAR_GRAM,
  NONPOSITIVE_DENOMINATOR,
  ZERO_LUMPED_ROW,
  LEFT_SET,
  TOO_SHORT,
  SAMPLING_FAILED,
  NOT_CONVERGED,
  IO_ERROR,
};

const char* error_name(ErrorCode c);

// Process exit codes: 0 ok, 2 config, 3 numeric guard, 4 left-set, 5 not-converged.
int exit_code_for(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace carleman
