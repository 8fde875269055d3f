#pragma once

#include <stdexcept>
#include <string>

namespace hgcoop {

// Malformed files, broken invariants, impossible configurations.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver could not produce a trustworthy answer.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hgcoop
