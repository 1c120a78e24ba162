#pragma once

#include <stdexcept>
#include <string>

namespace secuav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario or trajectory text.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A named invariant does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Endpoints cannot be connected within the slot budget.
class InfeasibleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace secuav
