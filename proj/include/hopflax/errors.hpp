#ifndef HOPFLAX_ERRORS_HPP
#define HOPFLAX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hopflax {

/// Inputs outside the mathematical domain of an operation (bad ranges,
/// mismatched dimensions, unmet structural requirements).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent problem configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A callback produced NaN or infinity where a finite value is required.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine exhausted its budget. Carries best-so-far diagnostics.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& msg, double best_value, double best_grad_norm,
                 int iterations)
      : std::runtime_error(msg),
        best_value_(best_value),
        best_grad_norm_(best_grad_norm),
        iterations_(iterations) {}

  double best_value() const { return best_value_; }
  double best_grad_norm() const { return best_grad_norm_; }
  int iterations() const { return iterations_; }

 private:
  double best_value_;
  double best_grad_norm_;
  int iterations_;
};

}  // namespace hopflax

#endif
