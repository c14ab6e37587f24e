#pragma once

#include <stdexcept>
#include <string>

namespace assure {

// Invalid argument values (out-of-range probabilities, non-positive scales, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Numerical failures: factorization breakdown, non-positive quadratic forms.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Rank deficiency detected where a unique solution is required.
class RankError : public NumericError {
 public:
  explicit RankError(const std::string& what) : NumericError(what) {}
};

// Inconsistent or incomplete run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace assure
