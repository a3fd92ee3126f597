#pragma once

#include <stdexcept>
#include <string>

namespace rtistab {

// Base class for all library failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments, malformed transfer functions, improper plants.
class InvalidInput : public Error {
public:
  using Error::Error;
};

// Numerical failure: non-convergent eigensolve, singular or
// ill-conditioned linear system, failed cancellation.
class NumericsError : public Error {
public:
  using Error::Error;
};

// Plant has relative degree >= 3, which this toolkit does not handle.
class UnsupportedRelativeDegree : public Error {
public:
  explicit UnsupportedRelativeDegree(int degree)
      : Error("unsupported relative degree " + std::to_string(degree) +
              " (supported: 0, 1, 2)"),
        relative_degree(degree) {}
  int relative_degree;
};

}  // namespace rtistab
