#pragma once

#include <stdexcept>
#include <string>

namespace fixedprice {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (bad ids, bad probabilities, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// A guarantee that must hold by construction was observed to fail.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace fixedprice
