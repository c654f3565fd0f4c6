#pragma once

// Capacitary potentials through exhaustion, superlevel sets and the
// level-set capacity identities, singular functions and their Green
// normalisation.

#include <optional>
#include <string>
#include <vector>

#include "pgreen/capacity.hpp"

namespace pgreen {

struct Potential {
  const WeightedGraph* ambient = nullptr;
  ScalarField field;
  NodeSet e;      // last-stage E
  NodeSet omega;  // last-stage Omega
  double capacity = 0.0;
  double energy = 0.0;
  std::vector<ScalarField> stage_history;
  std::vector<double> stage_radii;
};

/// Stage j solves the condenser problem on (E cap B_j, Omega cap B_j), warm
/// started from stage j-1. Throws ConsistencyError if stages fail to
/// increase nodewise (tolerance 1e-9) or the final energy misses the stage
/// capacity by more than 1e-8 relative.
Potential capacitary_potential(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                               const SolverConfig& config = {}, bool keep_history = false);

/// {u > a} or {u >= a}, intersected with the potential's Omega.
NodeSet superlevel(const Potential& potential, double a, bool strict);
NodeSet superlevel(const ScalarField& field, const NodeSet& omega, double a, bool strict);

/// Level sets in the identity checks and audits treat node values within
/// this distance of a level as attaining it, absorbing solver roundoff.
inline constexpr double kLevelSlack = 1e-9;

struct LevelIdentityReport {
  double a;
  double b;
  double level_capacity;      // cap(Omega^b, Omega_a)
  double ratio;               // level_capacity (b-a)^{p-1} / cap(E, Omega)
  double truncation_residual; // max |pot - clamp((u-a)/(b-a), 0, 1)|
  bool exact_expected;        // levels aligned with the discrete structure
};

/// Throws RejectedInput unless 0 <= a < b <= 1 and Omega^b is nonempty.
LevelIdentityReport verify_level_identity(const Potential& potential, double a, double b,
                                          const SolverConfig& config = {});

struct LevelAudit {
  double b;
  double capacity;  // cap({u >= b}, Omega)
  double ratio;     // capacity * b^{p-1}; 1 for a Green function
  bool exact;       // no edge straddles the level
};

struct GreenFunction {
  const WeightedGraph* ambient = nullptr;
  ScalarField field;
  NodeIndex x0 = 0;
  double peak = 0.0;   // u(x0)
  double alpha = 1.0;  // applied normalisation factor
  double p = 2.0;
  NodeSet omega;
  std::vector<LevelAudit> audit;
};

struct SingularResult {
  std::optional<GreenFunction> singular;
  std::vector<double> stage_radii;
  std::vector<double> stage_capacities;  // cap({x0}, Omega_j)
  std::vector<double> stage_peaks;       // cap^{1/(1-p)}
  std::optional<double> extrapolated_capacity;
  bool converged = false;
  std::string reason;
};

/// Threshold under which the limiting point capacity counts as zero, so no
/// singular function exists.
inline constexpr double kSingularCapacityFloor = 1e-10;

/// Stage j: cap({x0}, Omega_j)^{1/(1-p)} pot_{Omega_j}^{x0} on
/// Omega_j = Omega cap B_j. When the limiting point capacity is zero the
/// result carries no field and reason "no singular function".
SingularResult singular_function(const WeightedGraph& graph, const NodeSet& omega, NodeIndex x0,
                                 const ExhaustionSchedule& schedule, const SolverConfig& config = {});

/// Rescales so that cap({u >= b}, Omega) = b^{1-p}, using the pair
/// a = 0, b = u(x0), and audits up to `audit_levels` attained levels.
GreenFunction green_normalize(const GreenFunction& singular,
                              const SolverConfig& config = {}, int audit_levels = 4);

/// Energy of clamp(u, a, b): sum_e c_e |clamp(u_a) - clamp(u_b)|^p.
double green_energy_slab(const GreenFunction& green, double a, double b);

}  // namespace pgreen
