#ifndef TPSIR_ERRORS_HPP
#define TPSIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tpsir {

// Base class for all errors raised by this library. Each concrete class maps
// to one CLI exit code (see tools/main.cpp and README).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (bad number, wrong field count). Carries a 1-based
// line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Structurally valid file that violates the schema (duplicate week, negative
// count, missing column).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Step controller could not meet the local error tolerance.
class StepFailure : public Error {
 public:
  using Error::Error;
};

// State overflowed or became NaN during integration.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

// Initial compartment sizes exceed the population.
class InfeasibleInitial : public Error {
 public:
  using Error::Error;
};

// A sampler starting point has zero posterior density.
class InitInfeasible : public Error {
 public:
  using Error::Error;
};

// R0 is numerically indistinguishable from 1; stability undecidable.
class MarginalCase : public Error {
 public:
  using Error::Error;
};

// Fewer than two years of data after exclusions.
class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

// No baseline up-crossing in the onset band.
class NoOnsetFound : public Error {
 public:
  using Error::Error;
};

// No baseline down-crossing in the offset band.
class NoOffsetFound : public Error {
 public:
  using Error::Error;
};

}  // namespace tpsir

#endif  // TPSIR_ERRORS_HPP
