#include "pgreen/potential_green.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/limits.hpp"

namespace pgreen {

Potential capacitary_potential(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                               const SolverConfig& config, bool keep_history) {
  schedule.validate();
  const WeightedGraph& g = problem.ambient();
  Potential pot;
  pot.ambient = &g;
  std::vector<double> caps;
  std::optional<ScalarField> previous;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    const NodeSet ball = schedule.ball(g, schedule.radii[j]);
    NodeSet omega_j = set_intersection(problem.omega(), ball);
    NodeSet e_j = set_intersection(problem.e(), ball);
    auto solved = solve_condenser(g, e_j, omega_j, config, previous ? &*previous : nullptr);
    if (previous) {
      for (NodeIndex i = 0; i < g.node_count(); ++i) {
        if (solved.potential[i] < (*previous)[i] - 1e-9) {
          throw ConsistencyError("capacitary potential decreased at node " + std::to_string(i) + " between stages");
        }
      }
    }
    caps.push_back(solved.value);
    pot.stage_radii.push_back(schedule.radii[j]);
    if (keep_history) pot.stage_history.push_back(solved.potential);
    pot.field = solved.potential;
    pot.capacity = solved.value;
    pot.e = std::move(e_j);
    pot.omega = std::move(omega_j);
    previous = std::move(solved.potential);
    const bool attained = pot.e.size() == problem.e().size() && pot.omega.size() == problem.omega().size();
    if (attained || stopping_rule_met(caps, schedule.stop_tolerance)) break;
  }
  pot.energy = p_energy(g, pot.field);
  const double reference = solve_condenser(g, pot.e, pot.omega, config).value;
  if (std::abs(pot.energy - reference) > 1e-8 * std::max(reference, 1.0)) {
    throw ConsistencyError("potential energy " + format_real(pot.energy) + " differs from capacity " +
                           format_real(reference));
  }
  return pot;
}

NodeSet superlevel(const ScalarField& field, const NodeSet& omega, double a, bool strict) {
  std::vector<NodeIndex> out;
  for (NodeIndex i : omega) {
    if (strict ? field[i] > a : field[i] >= a) out.push_back(i);
  }
  return NodeSet(std::move(out));
}

NodeSet superlevel(const Potential& potential, double a, bool strict) {
  return superlevel(potential.field, potential.omega, a, strict);
}

namespace {

// True when some edge has one endpoint below `level` and the other above
// it, both by more than kLevelSlack.
bool straddled(const WeightedGraph& g, const ScalarField& u, double level) {
  for (const Edge& e : g.edges()) {
    const double lo = std::min(u[e.a], u[e.b]), hi = std::max(u[e.a], u[e.b]);
    if (lo < level - kLevelSlack && level + kLevelSlack < hi) return true;
  }
  return false;
}

const WeightedGraph& require_graph(const WeightedGraph* g) {
  if (!g) throw RejectedInput("result carries no ambient graph");
  return *g;
}

}  // namespace

LevelIdentityReport verify_level_identity(const Potential& potential, double a, double b,
                                          const SolverConfig& config) {
  const WeightedGraph& g = require_graph(potential.ambient);
  if (!(0.0 <= a && a < b && b <= 1.0)) throw RejectedInput("level identity needs 0 <= a < b <= 1");
  const NodeSet upper = superlevel(potential, b - kLevelSlack, false);
  if (upper.empty()) throw RejectedInput("superlevel set {u >= b} is empty");
  const NodeSet lower = superlevel(potential, a + kLevelSlack, true);

  LevelIdentityReport report{a, b, 0.0, 0.0, 0.0, false};
  auto solved = solve_condenser(g, upper, lower, config);
  report.level_capacity = solved.value;
  const double scaled = solved.value * std::pow(b - a, g.p() - 1.0);
  if (potential.capacity > 0.0) {
    report.ratio = scaled / potential.capacity;
  } else {
    report.ratio = scaled == 0.0 ? 1.0 : kInfinity;
  }
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const double truncated = std::clamp((potential.field[i] - a) / (b - a), 0.0, 1.0);
    report.truncation_residual = std::max(report.truncation_residual, std::abs(solved.potential[i] - truncated));
  }
  report.exact_expected = !straddled(g, potential.field, a) && !straddled(g, potential.field, b);
  return report;
}

SingularResult singular_function(const WeightedGraph& graph, const NodeSet& omega, NodeIndex x0,
                                 const ExhaustionSchedule& schedule, const SolverConfig& config) {
  schedule.validate();
  omega.validate(graph);
  if (!omega.contains(x0)) throw RejectedInput("singularity must lie in Omega");
  const double p = graph.p();
  const NodeSet point{x0};

  SingularResult result;
  std::optional<ScalarField> previous;
  std::optional<ScalarField> previous_pot;
  NodeSet last_omega;
  bool attained = false;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    NodeSet omega_j = set_intersection(omega, schedule.ball(graph, schedule.radii[j]));
    if (!omega_j.contains(x0)) continue;
    auto solved = solve_condenser(graph, point, omega_j, config, previous_pot ? &*previous_pot : nullptr);
    result.stage_radii.push_back(schedule.radii[j]);
    result.stage_capacities.push_back(solved.value);
    last_omega = std::move(omega_j);
    attained = last_omega.size() == omega.size();
    if (solved.value <= 0.0) {
      result.stage_peaks.push_back(kInfinity);
      previous.reset();
      previous_pot = std::move(solved.potential);
      if (attained) break;
      continue;
    }
    const double peak = std::pow(solved.value, 1.0 / (1.0 - p));
    result.stage_peaks.push_back(peak);
    ScalarField field = solved.potential;
    for (double& v : field.values()) v *= peak;
    if (previous) {
      for (NodeIndex i = 0; i < graph.node_count(); ++i) {
        if (field[i] < (*previous)[i] - 1e-9 * std::max(1.0, peak)) {
          throw ConsistencyError("singular-function stages decreased at node " + std::to_string(i));
        }
      }
    }
    previous = std::move(field);
    previous_pot = std::move(solved.potential);
    if (attained || stopping_rule_met(result.stage_capacities, schedule.stop_tolerance)) {
      result.converged = true;
      break;
    }
  }
  if (result.stage_capacities.empty()) throw RejectedInput("no schedule stage contains the singularity");

  if (auto fit = fit_power_tail(result.stage_radii, result.stage_capacities)) {
    result.extrapolated_capacity = std::max(fit->limit, 0.0);
  }
  // A finite stage that attains Omega is exact; otherwise the tail limit
  // decides whether the point capacity vanishes in the limit.
  double limit = result.stage_capacities.back();
  if (!attained && !result.converged && result.extrapolated_capacity) limit = *result.extrapolated_capacity;
  if (limit <= kSingularCapacityFloor || !previous) {
    result.reason = "no singular function: point capacity vanishes in the exhaustion limit";
    return result;
  }

  GreenFunction g;
  g.ambient = &graph;
  g.field = std::move(*previous);
  g.x0 = x0;
  g.peak = g.field[x0];
  g.alpha = 1.0;
  g.p = p;
  g.omega = std::move(last_omega);
  result.singular = std::move(g);
  result.reason = result.converged ? "converged" : "schedule exhausted";
  return result;
}

GreenFunction green_normalize(const GreenFunction& singular, const SolverConfig& config, int audit_levels) {
  const WeightedGraph& g = require_graph(singular.ambient);
  const ScalarField& v = singular.field;
  if (v.size() != g.node_count()) throw RejectedInput("singular field does not match its graph");
  if (v.max() == v.min()) throw RejectedInput("cannot normalise a constant function");
  const double p = g.p();
  const double peak_v = v[singular.x0];
  if (!(peak_v > 0.0)) throw RejectedInput("singular function must be positive at its singularity");

  const NodeSet top = superlevel(v, singular.omega, peak_v * (1.0 - kLevelSlack), false);
  const NodeSet positive = superlevel(v, singular.omega, 0.0, true);
  const double c = solve_condenser(g, top, positive, config).value * std::pow(peak_v, p - 1.0);
  if (!(c > 0.0)) throw RejectedInput("level capacity vanished; cannot normalise");
  const double alpha = std::pow(c, 1.0 / (1.0 - p));

  GreenFunction out = singular;
  for (double& x : out.field.values()) x *= alpha;
  out.alpha = singular.alpha * alpha;
  out.peak = out.field[singular.x0];
  out.audit.clear();

  std::vector<double> levels{out.peak};
  std::set<double> attained;
  for (NodeIndex i : out.omega) {
    const double x = out.field[i];
    // Levels within the slack of zero are roundoff on components without x0.
    if (x > kLevelSlack * std::max(1.0, out.peak) && x < out.peak) attained.insert(x);
  }
  if (audit_levels > 0 && !attained.empty()) {
    const std::vector<double> sorted(attained.begin(), attained.end());
    const std::size_t take = std::min<std::size_t>(audit_levels, sorted.size());
    for (std::size_t k = 0; k < take; ++k) levels.push_back(sorted[(k * (sorted.size() - 1)) / std::max<std::size_t>(take - 1, 1)]);
  }
  for (double b : levels) {
    const double cap = solve_condenser(g, superlevel(out.field, out.omega, b - kLevelSlack * std::max(1.0, b), false),
                                     out.omega, config).value;
    out.audit.push_back({b, cap, cap * std::pow(b, p - 1.0), !straddled(g, out.field, b)});
  }
  return out;
}

double green_energy_slab(const GreenFunction& green, double a, double b) {
  const WeightedGraph& g = require_graph(green.ambient);
  if (!(b > a)) throw RejectedInput("slab needs a < b");
  if (a < 0.0 || b > green.peak * (1.0 + 1e-12)) throw RejectedInput("slab needs 0 <= a < b <= u(x0)");
  const double p = g.p();
  double energy = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = std::clamp(green.field[e.a], a, b) - std::clamp(green.field[e.b], a, b);
    if (d != 0.0) energy += e.conductance * std::pow(std::abs(d), p);
  }
  return energy;
}

}  // namespace pgreen
