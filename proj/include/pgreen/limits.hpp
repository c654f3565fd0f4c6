#pragma once

// Stage-sequence limits: the stopping rule and the power-law tail
// extrapolation shared by every exhaustion-based computation.

#include <optional>
#include <span>

namespace pgreen {

/// True once two consecutive stage increments satisfy
/// |v_j - v_{j+1}| < tol * max(|v_{j+1}|, 1e-12).
bool stopping_rule_met(std::span<const double> values, double tol);

struct TailFit {
  double limit;      // c_inf
  double amplitude;  // A
  double exponent;   // beta
  double residual;   // root-mean-square misfit
};

/// Least-squares fit of v = c_inf + A r^(-beta) over the last four
/// (radius, value) pairs. Empty when fewer than four finite radii exist.
std::optional<TailFit> fit_power_tail(std::span<const double> radii, std::span<const double> values);

}  // namespace pgreen
