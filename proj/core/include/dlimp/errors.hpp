#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dlimp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parsing / declaration checking.
struct SyntaxError : Error {
  SyntaxError(int line, int column, std::string what_arg,
              std::vector<std::string> expected = {})
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what_arg),
        line(line), column(column), expected(std::move(expected)) {}
  int line;
  int column;
  std::vector<std::string> expected;
};

struct DeclarationError : Error {
  explicit DeclarationError(const std::string& name)
      : Error("undeclared identifier: " + name), name(name) {}
  std::string name;
};

// Substitution and renaming.
struct CaptureError : Error {
  using Error::Error;
};
struct FreshnessError : Error {
  using Error::Error;
};

// Definitions.
struct IllFormedFamily : Error {
  using Error::Error;
};
struct ShadowingError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};

// Kernel.
struct NoCertificateError : Error {
  using Error::Error;
};
struct ArityError : Error {
  using Error::Error;
};
struct PositionError : Error {
  using Error::Error;
};

// Lemma factory.
struct UnregisteredCoordinate : Error {
  using Error::Error;
};
struct PivotNotFree : Error {
  using Error::Error;
};
struct TargetNotFound : Error {
  using Error::Error;
};
struct MissingAxiom : Error {
  using Error::Error;
};

// Numeric oracle.
struct DivisionByZero : Error {
  using Error::Error;
};
struct IntegrationError : Error {
  using Error::Error;
};
struct PolicyExhausted : Error {
  using Error::Error;
};
struct UnsupportedFormula : Error {
  using Error::Error;
};
struct EvalError : Error {
  using Error::Error;
};

}  // namespace dlimp
