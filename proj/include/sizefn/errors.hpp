#pragma once

#include <stdexcept>
#include <string>

namespace sizefn {

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File contents do not follow the expected format.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data parsed fine but violates a structural invariant (bad index, duplicate edge, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sizefn
