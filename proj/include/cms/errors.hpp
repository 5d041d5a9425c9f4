#pragma once

#include <stdexcept>

namespace cms {

// Invalid sketch/experiment configuration (zero dimensions, mismatched merge).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A 64-bit counter would wrap.
class CounterOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Malformed snapshot, trace, or config file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cms
