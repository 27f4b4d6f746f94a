#pragma once

#include <stdexcept>

namespace idsforge {

// Bad input or configuration supplied by the caller. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant did not hold. The CLI maps it to exit code 3.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace idsforge
