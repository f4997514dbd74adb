#pragma once

#include <stdexcept>
#include <string>

namespace bentcert {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (shape, Hermiticity, state-ness).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not reach its stated accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bentcert
