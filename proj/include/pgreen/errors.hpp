#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pgreen {

/// Input that violates a documented precondition (bad sets, conflicting
/// pins, unattainable targets, malformed config).
class RejectedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The minimizer did not reach its tolerance. Carries the last iterate so
/// callers can inspect or resume.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> last_iterate, double residual)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

/// A computed object broke an invariant it must satisfy by construction
/// (e.g. exhaustion stages that are not nodewise monotone).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pgreen
