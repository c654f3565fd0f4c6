#pragma once

// Dirichlet problems on truncations of unbounded domains with an explicit
// value at infinity, the Sobolev-type solution with a free outer shell,
// regularity probes and a heuristic Perron bracket.
//
// Upper and lower Perron envelopes are not computed. The bracket solves
// the pinned problem twice with the shell at the extremes of the data; it
// is labelled heuristic in every output.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pgreen/model_space.hpp"
#include "pgreen/penergy_solver.hpp"

namespace pgreen {

enum class ShellMode { pinned, free };
const char* to_string(ShellMode m);

/// Values on the vertex boundary of Omega plus the value at infinity.
/// In pinned mode every stage pins Omega outside the stage ball to
/// value_at_infinity; in free mode those nodes are unconstrained.
struct BoundaryData {
  std::vector<Pin> finite_values;
  std::optional<double> value_at_infinity;
  ShellMode shell = ShellMode::pinned;
};

/// Pins every node of the vertex boundary of `omega` to `f(node)`.
std::vector<Pin> boundary_pins(const WeightedGraph& graph, const NodeSet& omega,
                               const std::function<double(NodeIndex)>& f);

struct PerronResult {
  ScalarField field;       // stage limit: converged stage or nodewise tail extrapolation
  ScalarField last_stage;  // raw field of the final truncation
  std::vector<double> stage_radii;
  std::vector<ScalarField> stage_fields;
  bool converged = false;   // stopping rule met or Omega attained
  bool extrapolated = false;
};

/// Stage j solves the Dirichlet problem on Omega cap B_{r_j}. Throws
/// RejectedInput when Omega has no boundary and no value at infinity is
/// set, when a boundary node lacks data, when a pin lies inside Omega, or
/// when a pinned stage has a nonempty shell and no value at infinity.
PerronResult perron_solution(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                             const ExhaustionSchedule& schedule, const SolverConfig& config = {});

/// Single solve with only the finite pins; the outer shell is free.
ScalarField hf_solution(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                        const SolverConfig& config = {});

struct AtInfinity {};
using ProbePoint = std::variant<NodeIndex, AtInfinity>;

enum class Regularity { regular, irregular, inconclusive };
const char* to_string(Regularity r);

inline constexpr double kRegularThreshold = 0.01;
inline constexpr double kIrregularThreshold = 0.1;

struct ProbeRow {
  double scale;  // stage radius at infinity, ring radius at a node
  double value;
};

struct RegularityReport {
  Regularity verdict = Regularity::inconclusive;
  std::vector<ProbeRow> trace;  // ordered towards the probed point
  double limit = 0.0;           // tail-extrapolated trace limit, else the last value
};

/// Barrier data d_inf(y) = exp(-d(y, x0)) with value 0 at infinity, or
/// d_x(y) = min(d(y, x), 1) with value 1 at infinity. At infinity the trace
/// holds, per stage, the largest free value at distance >= r_j / 2; at a
/// node it holds the largest value within k * min_edge_length, k = 4..1.
/// The trace is extrapolated towards the point with the power-tail fit in
/// scale (1/scale at a node). Regular when that limit is below
/// kRegularThreshold, irregular when it exceeds kIrregularThreshold and the
/// trace never decreases.
RegularityReport regularity_probe(const WeightedGraph& graph, const NodeSet& omega, const ProbePoint& point,
                                  const ExhaustionSchedule& schedule, const SolverConfig& config = {});

struct PerronBracket {
  ScalarField lower;
  ScalarField upper;
  double width = 0.0;  // max over Omega of upper - lower
  std::string label = "heuristic bracket: shell pinned at inf and sup of the data";
};

PerronBracket bracket_upper_lower(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                                  const ExhaustionSchedule& schedule, const SolverConfig& config = {});

}  // namespace pgreen
