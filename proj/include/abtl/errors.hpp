// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace abtl {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  singular_shift,
  breakdown,
  deflation,
  structure_loss,
  singular_mass,
  degenerate,
  parse,
  io,
  unsupported,
};

const char* to_string(ErrorCode code);

/// Base of every error raised by the library. The code is what the C API
/// reports; the message carries the diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::dimension_mismatch, what) {}
};

/// (omega I - A), a reduced resolvent or a quadratic pencil is singular at
/// `shift` according to the relative pivot test.
class SingularShiftError : public Error {
 public:
  SingularShiftError(std::complex<double> shift, const std::string& context);
  std::complex<double> shift() const noexcept { return shift_; }

 private:
  std::complex<double> shift_;
};

/// W^T V of a new block pair lost numerical invertibility.
class BreakdownError : public Error {
 public:
  BreakdownError(std::size_t iteration, double ratio);
  std::size_t iteration() const noexcept { return iteration_; }
  double singular_ratio() const noexcept { return ratio_; }

 private:
  std::size_t iteration_;
  double ratio_;
};

class DeflationError : public Error {
 public:
  DeflationError(std::size_t iteration, const std::string& what);
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace abtl
