#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gsee {

/// Raised when an argument lies outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the planner when the shrink loops exhaust their caps.
/// `predicate()` names the constraint that was still failing.
class PlanInfeasible : public std::runtime_error {
 public:
  PlanInfeasible(std::string predicate, const std::string& message)
      : std::runtime_error(message), predicate_(std::move(predicate)) {}

  const std::string& predicate() const noexcept { return predicate_; }

 private:
  std::string predicate_;
};

class SpectrumMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable file or a configuration document that violates the schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyBasket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsee
