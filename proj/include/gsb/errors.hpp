#pragma once

#include <stdexcept>
#include <string>

namespace gsb {

// Query outside the lateral grid span, or similar out-of-domain input.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Invalid or mutually incompatible configuration values.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation not permitted in the current episode state (e.g. finished).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Malformed client input: trajectories, payloads, log records.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A decision that breaks a geometric constraint. `bound()` names which one.
class ConstraintViolation : public std::invalid_argument {
 public:
  ConstraintViolation(std::string bound, const std::string& detail)
      : std::invalid_argument(detail), bound_(std::move(bound)) {}
  const std::string& bound() const noexcept { return bound_; }

 private:
  std::string bound_;
};

// Replayed results disagree with recorded ones.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gsb
