#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpcore {

/// Failure categories shared by every layer. The numeric values are the
/// status codes returned across the C boundary (0 is success).
enum class ErrorCode : int {
  kInvalidHandle = 1,
  kDimensionMismatch = 2,
  kSingular = 3,
  kParse = 4,
  kOverflow = 5,
  kInternal = 6,
  kDivideByZero = 7,
  kDomain = 8,
  kIo = 9,
  kUsage = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what)
      : Error(ErrorCode::kOverflow, what) {}
};

class DivideByZeroError : public Error {
 public:
  explicit DivideByZeroError(const std::string& what)
      : Error(ErrorCode::kDivideByZero, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::kDimensionMismatch, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::kParse, what) {}
};

/// Raised when elimination meets an exactly zero pivot; `step` is the column
/// index at which it happened.
class SingularError : public Error {
 public:
  SingularError(std::size_t step, const std::string& what)
      : Error(ErrorCode::kSingular, what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace mpcore
