#include "carleman/errors.hpp"

namespace carleman {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::CONFIG_ERROR: return "CONFIG_ERROR";
    case ErrorCode::X0_INSIDE: return "X0_INSIDE";
    case ErrorCode::NONPOSITIVE_N: return "NONPOSITIVE_N";
    case ErrorCode::BAD_D: return "BAD_D";
    case ErrorCode::GRID_TOO_SMALL: return "GRID_TOO_SMALL";
    case ErrorCode::CFL_VIOLATION: return "CFL_VIOLATION";
    case ErrorCode::INVARIANT_FAIL: return "INVARIANT_FAIL";
    case ErrorCode::NO_EXTERIOR_NODES: return "NO_EXTERIOR_NODES";
    case ErrorCode::TOO_FEW_SAMPLES: return "TOO_FEW_SAMPLES";
    case ErrorCode::LAYER_TOO_WIDE: return "LAYER_TOO_WIDE";
    case ErrorCode::TRACE_SHAPE_MISMATCH: return "TRACE_SHAPE_MISMATCH";
    case ErrorCode::SINGULAR_GRAM: return "SINGULAR_GRAM";
    case ErrorCode::NONPOSITIVE_DENOMINATOR: return "NONPOSITIVE_DENOMINATOR";
    case ErrorCode::ZERO_LUMPED_ROW: return "ZERO_LUMPED_ROW";
    case ErrorCode::LEFT_SET: return "LEFT_SET";
    case ErrorCode::TOO_SHORT: return "TOO_SHORT";
    case ErrorCode::SAMPLING_FAILED: return "SAMPLING_FAILED";
    case ErrorCode::NOT_CONVERGED: return "NOT_CONVERGED";
    case ErrorCode::IO_ERROR: return "IO_ERROR";
  }
  return "UNKNOWN";
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::CONFIG_ERROR:
    case ErrorCode::X0_INSIDE:
    case ErrorCode::NONPOSITIVE_N:
    case ErrorCode::BAD_D:
    case ErrorCode::GRID_TOO_SMALL:
    case ErrorCode::TOO_FEW_SAMPLES:
    case ErrorCode::LAYER_TOO_WIDE:
    case ErrorCode::TRACE_SHAPE_MISMATCH:
    case ErrorCode::TOO_SHORT:
    case ErrorCode::IO_ERROR:
      return 2;
    case ErrorCode::CFL_VIOLATION:
    case ErrorCode::INVARIANT_FAIL:
    case ErrorCode::NO_EXTERIOR_NODES:
    case ErrorCode::SINGULAR_GRAM:
    case ErrorCode::NONPOSITIVE_DENOMINATOR:
    case ErrorCode::ZERO_LUMPED_ROW:
    case ErrorCode::SAMPLING_FAILED:
      return 3;
    case ErrorCode::LEFT_SET:
      return 4;
    case ErrorCode::NOT_CONVERGED:
      return 5;
  }
  return 1;
}

}  // namespace carleman
