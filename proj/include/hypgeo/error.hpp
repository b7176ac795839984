#pragma once

#include <stdexcept>
#include <string>

namespace hypgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured element/support/cache cap would be exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A value was requested outside the evaluable (cached) range.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// An estimator could not produce a result with the requested guarantees.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace hypgeo
