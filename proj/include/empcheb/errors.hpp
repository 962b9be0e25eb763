#ifndef EMPCHEB_ERRORS_HPP
#define EMPCHEB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace empcheb {

/// Stable error codes; the CLI maps each to a machine-parseable record.
enum class ErrorCode {
  invalid_dimension,
  shape_mismatch,
  invalid_sample,
  insufficient_samples,
  invalid_radius,
  invalid_probability,
  invalid_k,
  singular_covariance,
  invalid_covariance,
  infeasible_epsilon,
  degenerate_spec,
  spec_validation,
  format_error,
  empty_input,
  usage,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a target false-alarm probability cannot be met at the current
/// sample count; carries the smallest epsilon that is feasible there.
class InfeasibleEpsilonError : public Error {
 public:
  InfeasibleEpsilonError(const std::string& message, double min_feasible)
      : Error(ErrorCode::infeasible_epsilon, message),
        min_feasible_(min_feasible) {}

  double min_feasible_epsilon() const noexcept { return min_feasible_; }

 private:
  double min_feasible_;
};

}  // namespace empcheb

#endif  // EMPCHEB_ERRORS_HPP
