#pragma once

#include <stdexcept>
#include <string>

namespace wbary {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid instance data (parse failures, bad masses, ...).
class InstanceError : public Error {
 public:
  using Error::Error;
};

/// The LP engine could not produce a trustworthy answer.
class LpError : public Error {
 public:
  using Error::Error;
};

class MasterError : public Error {
 public:
  using Error::Error;
};

class PricingError : public Error {
 public:
  using Error::Error;
};

class ColumnGenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbary
