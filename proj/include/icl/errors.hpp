#pragma once

#include <stdexcept>
#include <string>

namespace icl {

// Base class for all failures raised by the lab. CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or index mismatch (e.g. K > d when building a basis).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration would exceed the configured composition budget;
// callers should fall back to Monte Carlo.
class EnumerationBudgetError : public Error {
 public:
  using Error::Error;
};

// Operation applied to a distribution of the wrong regime.
class RegimeMismatchError : public Error {
 public:
  using Error::Error;
};

// Prompt lacks a required ingredient (e.g. task vector for embedding).
class InvalidPromptError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered where finiteness is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Config file failed to parse or validate; carries the offending line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

}  // namespace icl
