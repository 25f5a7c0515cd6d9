#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pickands {

/// Parameter outside its mathematical domain (e.g. alpha not in (0, 2]).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Malformed call: wrong lengths, non-power-of-two sizes, bad configuration.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown (indefinite covariance, failed factorization).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The circulant embedding of a Toeplitz covariance has a significantly
/// negative eigenvalue.
class EmbeddingError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// A bound could not be formed because one of its analytic preconditions
/// failed. `term()` names the offending term.
class PreconditionError : public NumericalError {
public:
  PreconditionError(std::string term, const std::string& what)
      : NumericalError(term + ": " + what), term_(std::move(term)) {}

  const std::string& term() const noexcept { return term_; }

private:
  std::string term_;
};

}  // namespace pickands
