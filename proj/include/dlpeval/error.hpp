#pragma once

#include <stdexcept>
#include <string>

namespace dlpeval {

/// Coarse error class; the CLI maps it onto its exit code.
enum class ErrorKind { Validation, Data, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad configuration or arguments supplied by the caller.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

/// Input data that cannot be used: malformed rows, impossible splits, empty pools.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyPoolError : public DataError {
 public:
  using DataError::DataError;
};

class RejectionBudgetExceeded : public DataError {
 public:
  using DataError::DataError;
};

class MissingScoreError : public DataError {
 public:
  using DataError::DataError;
};

/// Broken streaming contract (out-of-order advance, query into the past).
class OrderError : public Error {
 public:
  explicit OrderError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

}  // namespace dlpeval
