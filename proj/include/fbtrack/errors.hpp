#pragma once

#include <stdexcept>
#include <string>

namespace fbtrack {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, root solve) failed to reach its target.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeds a fixed size guard (histogram cells, codebook size, search size).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// No solution exists for the requested target.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace fbtrack
