#pragma once

#include <stdexcept>
#include <string>

namespace ajb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Shapes or counts that do not agree with each other.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input is well formed but numerically unusable (zero scale, zero vector, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class LineSearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace ajb
