#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparselms {

/// Thrown when a caller breaks a documented precondition (dimension
/// mismatch, non-finite input, out-of-range parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Step size / covariance combination outside the region where the
/// mean-square analysis is defined (mu * lambda_max >= 1, eta >= 2, ...).
class StabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A trial whose estimate norm blew past the divergence threshold.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& filter)
      : std::runtime_error("filter '" + filter + "' diverged at iteration " +
                           std::to_string(iteration)),
        iteration_(iteration),
        filter_(filter) {}

  std::size_t iteration() const noexcept { return iteration_; }
  const std::string& filter() const noexcept { return filter_; }

 private:
  std::size_t iteration_;
  std::string filter_;
};

/// Bad preset name, unknown config key, malformed value.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sparselms
