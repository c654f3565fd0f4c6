#pragma once

// Condenser, Sobolev and D^p capacities on weighted graphs, property
// checkers, and the nested-annuli construction.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgreen/model_space.hpp"
#include "pgreen/penergy_solver.hpp"

namespace pgreen {

/// Energies below this are reported as exactly zero.
inline constexpr double kZeroCapacity = 1e-14;
/// Naive surrogate divergence factor relative to the first stage.
inline constexpr double kNaiveDivergenceFactor = 1e6;

/// The pair (E, Omega) in an ambient graph. E flagged unbounded is
/// computed through the limit over E intersected with schedule balls.
class CondenserProblem {
 public:
  /// Throws RejectedInput for invalid sets or E not contained in Omega
  /// (a node pinned to both 1 and 0).
  CondenserProblem(const WeightedGraph& ambient, NodeSet e, NodeSet omega, bool e_unbounded = false);

  const WeightedGraph& ambient() const { return *ambient_; }
  const NodeSet& e() const { return e_; }
  const NodeSet& omega() const { return omega_; }
  bool e_unbounded() const { return e_unbounded_; }
  double p() const { return ambient_->p(); }

 private:
  const WeightedGraph* ambient_;
  NodeSet e_;
  NodeSet omega_;
  bool e_unbounded_;
};

enum class StopReason { single_solve, empty_set, stopping_rule, set_exhausted, schedule_exhausted, diverged, infeasible };
const char* to_string(StopReason r);

struct CapacityReport {
  double value = 0.0;
  bool infinite = false;
  ScalarField potential;
  std::vector<double> stage_radii;
  std::vector<double> stage_values;
  bool converged = true;
  StopReason stopping_reason = StopReason::single_solve;
  std::optional<double> extrapolated;  // power-law tail limit over the last four stages
};

/// Minimal energy with u = 1 on E and u = 0 off Omega; the minimiser is the
/// capacitary potential. `warm` seeds the free values.
struct CondenserSolve {
  double value;
  ScalarField potential;
};
CondenserSolve solve_condenser(const WeightedGraph& graph, const NodeSet& e, const NodeSet& omega,
                               const SolverConfig& config = {}, const ScalarField* warm = nullptr);

/// min sum_i m_i |u_i|^p + p_energy(u) over u >= 1 on E.
double sobolev_capacity(const WeightedGraph& graph, const NodeSet& e, const SolverConfig& config = {},
                        ScalarField* minimizer = nullptr);

CapacityReport condenser_capacity(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                                  const SolverConfig& config = {});

/// Capacity without the limit over E intersected with balls. For E flagged
/// unbounded the admissible fields must also vanish on the shell outside
/// the largest schedule ball, which emulates integrability on an
/// infinite-measure space: E reaching the shell is infeasible, and stage
/// surrogates growing past kNaiveDivergenceFactor report +inf.
CapacityReport condenser_capacity_naive(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                                        const SolverConfig& config = {});

/// min p_energy with u = 1 on E and u = 0 on F, free everywhere else.
double cap_Dp(const WeightedGraph& graph, const NodeSet& e, const NodeSet& f, const SolverConfig& config = {},
              ScalarField* minimizer = nullptr);

struct AxiomSample {
  NodeSet e1;
  NodeSet e2;
  NodeSet omega;
  NodeSet omega_outer;  // superset of omega
};

struct AxiomViolation {
  std::string property;
  AxiomSample witness;
  double lhs;
  double rhs;
};

struct AxiomReport {
  int samples = 0;
  std::vector<AxiomViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Checks monotonicity, strong subadditivity and finite subadditivity on
/// `count` samples, each to `tolerance` absolute.
AxiomReport check_capacity_axioms(const WeightedGraph& graph, const std::function<AxiomSample()>& sampler,
                                  int count, const SolverConfig& config = {}, double tolerance = 1e-7);

struct ExhaustionReport {
  std::vector<double> stage_values;
  double reference;  // cap(E, Omega)
  bool monotone;
  bool matches;
  bool passed() const { return monotone && matches; }
};

/// Capacities of E relative to increasing Omega stages: must not increase
/// and must end at cap(E, Omega) within `tolerance` (relative).
ExhaustionReport check_exhaustion_limit(const CondenserProblem& problem, std::span<const NodeSet> omega_stages,
                                        const SolverConfig& config = {}, double tolerance = 1e-8);

/// Nested annuli with cap(B_{s_1}, B_1) = c_0 and
/// cap(B_{r_j}, B_{s_j}) = c_j - c_0, so that the condensers
/// ({s_j <= |x| <= s_1}, {r_j < |x| < 1}) have capacity c_j.
struct WarningRing {
  int n;
  double p;
  double c0;
  double s1;
  std::vector<double> targets;  // c_1, c_2, ...
  std::vector<double> r;
  std::vector<double> s;

  /// Capacity of the j-th induced condenser (0-based), from the closed form.
  double condenser_capacity(std::size_t j) const;
};

/// `c` holds c_0 followed by c_1, c_2, ... with c_j > c_0 > 0; requires
/// 1 < p <= n. Throws RejectedInput with the attainable range when a target
/// cannot be bracketed.
WarningRing build_warning_ring(std::span<const double> c, int n, double p);

}  // namespace pgreen
