#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed clause text. `offset` is a byte offset into the clause text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected, const std::string &detail)
      : Error(detail + " at offset " + std::to_string(offset) + " (expected " + expected + ")"),
        offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string &expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

class AnchorNotFound : public Error {
 public:
  using Error::Error;
};

enum class EvalErrorKind {
  UnboundVariable,
  IndexOutOfRange,
  UnboundedQuantifier,
  DivisionByZero,
  MissingOldSnapshot,
  TypeError,
};

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string &what) : Error(what), kind_(kind) {}
  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

class SitePathInvalid : public Error {
 public:
  using Error::Error;
};

class UnknownClause : public Error {
 public:
  using Error::Error;
};

class VerifierUnavailable : public Error {
 public:
  using Error::Error;
};

class CommandNotFound : public VerifierUnavailable {
 public:
  using VerifierUnavailable::VerifierUnavailable;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class TimeoutBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class EndpointError : public Error {
 public:
  using Error::Error;
};

class InsufficientShots : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace specgen
