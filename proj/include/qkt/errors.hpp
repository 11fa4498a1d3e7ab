#pragma once

#include <stdexcept>
#include <string>

namespace qkt {

/// Input outside an operation's domain (bad index, bad angle, size mismatch).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical invariant was violated badly enough that the result cannot be
/// trusted (negative populations, norm drift, eigensolver failure).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qkt
