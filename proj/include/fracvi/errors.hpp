#pragma once

#include <stdexcept>
#include <string>

namespace fracvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed problem file, with 1-based position of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A well-formed input that violates a structural or analytic invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual, int level = -1)
      : Error(what), residual_(residual), level_(level) {}
  double residual() const { return residual_; }
  int level() const { return level_; }

 private:
  double residual_;
  int level_;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class CoercivityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace fracvi
