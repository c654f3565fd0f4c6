#pragma once

// Minimisation of the discrete p-energy sum_e c_e |u_a - u_b|^p under
// Dirichlet pins and lower-bound (obstacle) constraints.
//
// The objective is smoothed to sum_e c_e (t^2 + eps^2)^(p/2) and eps is
// driven down a fixed schedule; each stage runs a projected damped Newton
// iteration with Armijo backtracking. For p == 2 the smoothing is a
// constant shift and a single stage is used.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pgreen/model_space.hpp"

namespace pgreen {

/// One real value per node. Values must be finite.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values);
  static ScalarField constant(std::size_t n, double value) { return ScalarField(std::vector<double>(n, value)); }
  static ScalarField indicator(std::size_t n, const NodeSet& set);

  std::size_t size() const { return values_.size(); }
  double operator[](NodeIndex i) const { return values_[i]; }
  double& operator[](NodeIndex i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double max() const;
  double min() const;

 private:
  std::vector<double> values_;
};

struct SolverConfig {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7,
                               1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-13};
  /// Per-node residual bound, |g_i| <= tol * max(1, D_i) where D_i is the
  /// sum of the absolute flux terms meeting node i.
  double gradient_tolerance = 1e-9;
  double energy_rel_tolerance = 1e-12;
  int max_iterations = 500;  // per eps stage
  bool record_trace = false;

  void validate() const;
};

struct TraceRow {
  int stage;
  int iteration;
  double epsilon;
  double energy;
  double residual;
};

struct Pin {
  NodeIndex node;
  double value;
};

/// General problem: per node either pinned to `values[i]`, or free with
/// initial guess `values[i]` and optional lower bound. `mass`, when
/// non-empty, adds sum_i mass_i |u_i|^p to the objective.
struct EnergyProblem {
  std::vector<bool> fixed;
  std::vector<double> values;
  std::vector<double> lower;  // empty: unconstrained
  std::vector<double> mass;   // empty: no zeroth-order term

  static EnergyProblem dirichlet(std::size_t n, std::span<const Pin> pins);
};

struct SolveResult {
  ScalarField field;
  double energy = 0.0;       // sum_e c_e |du|^p, unsmoothed
  double mass_energy = 0.0;  // sum_i m_i |u_i|^p when a mass term is present
  double residual = 0.0;     // final scaled projected residual
  int iterations = 0;
  std::vector<TraceRow> trace;
};

/// Sum over edges of c_e |u_a - u_b|^p.
double p_energy(const WeightedGraph& graph, const ScalarField& field);

/// Gradient of p_energy: p * sum_j c_ij |u_i-u_j|^(p-2) (u_i-u_j), with the
/// convention that equal endpoint values contribute zero.
std::vector<double> p_laplacian(const WeightedGraph& graph, const ScalarField& field);

double smoothed_energy(const WeightedGraph& graph, const ScalarField& field, double eps);
std::vector<double> smoothed_gradient(const WeightedGraph& graph, const ScalarField& field, double eps);

/// Throws NonConvergence when the final stage misses the residual bound.
SolveResult minimize_energy(const WeightedGraph& graph, const EnergyProblem& problem,
                            const SolverConfig& config = {});

/// p-harmonic extension of the pinned values.
ScalarField solve_dirichlet(const WeightedGraph& graph, std::span<const Pin> fixed,
                            const SolverConfig& config = {});

/// Minimiser of p_energy subject to u = 0 on zero_set and u >= obstacle.
ScalarField solve_obstacle(const WeightedGraph& graph, const ScalarField& obstacle, const NodeSet& zero_set,
                           const SolverConfig& config = {});

/// Writes a trace as CSV (stage, iteration, epsilon, energy, residual).
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace pgreen
