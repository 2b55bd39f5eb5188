#pragma once

#include <stdexcept>
#include <string>

namespace rmcdp {

// Malformed or physically impossible instance data.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed request that does not fit the instance (wrong trip
// multiplicities, schedule not covering the trips, dimension mismatch...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive search refused to start because the space is too large.
class SizeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmcdp
