#pragma once

#include <stdexcept>

namespace lightroute {

/// An internal consistency check failed. Never a user error.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid configuration or input value supplied by the user.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lightroute
