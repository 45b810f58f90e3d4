#pragma once

#include <stdexcept>
#include <string>

namespace spatspec {

// Argument outside the mathematical domain of an operation, or a
// configuration that violates a model invariant.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed to reach its requested accuracy.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

// A truncated power series did not pass its ratio test within the term budget.
class SeriesDivergence : public std::runtime_error {
 public:
  SeriesDivergence(const std::string& what, int terms)
      : std::runtime_error(what), terms_(terms) {}

  int terms() const noexcept { return terms_; }

 private:
  int terms_;
};

}  // namespace spatspec
