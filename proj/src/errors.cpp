// SPDX-License-Identifier: Apache-2.0
#include "abtl/errors.hpp"

#include <sstream>

namespace abtl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::singular_shift: return "singular shift";
    case ErrorCode::breakdown: return "Lanczos breakdown";
    case ErrorCode::deflation: return "deflation";
    case ErrorCode::structure_loss: return "second-order structure loss";
    case ErrorCode::singular_mass: return "singular mass matrix";
    case ErrorCode::degenerate: return "degenerate residual";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::io: return "I/O error";
    case ErrorCode::unsupported: return "unsupported";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

namespace {

std::string shift_message(std::complex<double> shift, const std::string& context) {
  std::ostringstream os;
  os.precision(17);
  os << context << ": singular at shift (" << shift.real() << ", " << shift.imag() << ")";
  return os.str();
}

std::string breakdown_message(std::size_t iteration, double ratio) {
  std::ostringstream os;
  os << "breakdown at iteration " << iteration
     << ": smallest/largest singular value of W^T V is " << ratio;
  return os.str();
}

}  // namespace

SingularShiftError::SingularShiftError(std::complex<double> shift, const std::string& context)
    : Error(ErrorCode::singular_shift, shift_message(shift, context)), shift_(shift) {}

BreakdownError::BreakdownError(std::size_t iteration, double ratio)
    : Error(ErrorCode::breakdown, breakdown_message(iteration, ratio)),
      iteration_(iteration),
      ratio_(ratio) {}

DeflationError::DeflationError(std::size_t iteration, const std::string& what)
    : Error(ErrorCode::deflation,
            "deflation at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : Error(ErrorCode::parse, path + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace abtl
