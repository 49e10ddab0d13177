#pragma once

#include <stdexcept>
#include <string>

namespace wqkd {

// Malformed or out-of-contract input (bad angle, invalid distribution, bad config).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An objective produced a non-finite value during a search.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wqkd
