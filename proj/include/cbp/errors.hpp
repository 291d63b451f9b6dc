#pragma once

#include <stdexcept>
#include <string>

namespace cbp {

// Base of every error raised by the library; the CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A vector that must be normalised has (near) zero length, i.e. two
// referenced points are collocated.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// A shape-space relation (law of cosines, projected dot product) left [-1, 1].
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Two agents, or an agent and a beacon, came closer than the abort distance.
class SingularityAbort : public Error {
 public:
  using Error::Error;
};

class TooShort : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace cbp
