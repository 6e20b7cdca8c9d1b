#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace bose_ldp {

// Invalid model or configuration parameters. The CLI maps this to exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Function argument outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Series or integral that is infinite at the requested point.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Derivative evaluated at a branch point.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Parameters outside the regime where a solver's answer is justified.
// The CLI maps this to exit code 2.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Six significant digits, for error messages.
inline std::string message_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace bose_ldp
