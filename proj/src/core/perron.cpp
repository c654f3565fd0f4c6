#include "pgreen/perron.hpp"

#include <algorithm>
#include <cmath>

#include "pgreen/errors.hpp"
#include "pgreen/limits.hpp"

namespace pgreen {

const char* to_string(ShellMode m) { return m == ShellMode::pinned ? "pinned" : "free"; }

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::regular:
      return "regular";
    case Regularity::irregular:
      return "irregular";
    case Regularity::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::vector<Pin> boundary_pins(const WeightedGraph& graph, const NodeSet& omega,
                               const std::function<double(NodeIndex)>& f) {
  std::vector<Pin> pins;
  for (NodeIndex i : outer_boundary(graph, omega)) pins.push_back({i, f(i)});
  return pins;
}

namespace {

// Data validated against Omega: per-node pin values off Omega.
struct CheckedData {
  std::vector<double> pin_value;
  std::vector<bool> has_pin;
  NodeSet boundary;
  double lo = kInfinity;
  double hi = -kInfinity;
};

CheckedData check_data(const WeightedGraph& g, const NodeSet& omega, const BoundaryData& data) {
  omega.validate(g);
  CheckedData c;
  const std::size_t n = g.node_count();
  c.pin_value.assign(n, 0.0);
  c.has_pin.assign(n, false);
  for (const Pin& pin : data.finite_values) {
    if (pin.node >= n) throw RejectedInput("boundary pin outside the graph");
    if (omega.contains(pin.node)) throw RejectedInput("boundary pin on node " + std::to_string(pin.node) + " inside Omega");
    if (!std::isfinite(pin.value)) throw RejectedInput("boundary values must be finite");
    c.pin_value[pin.node] = pin.value;
    c.has_pin[pin.node] = true;
  }
  c.boundary = outer_boundary(g, omega);
  if (c.boundary.empty() && !data.value_at_infinity) {
    throw RejectedInput("Omega has no boundary and no value at infinity; the Dirichlet problem is undefined");
  }
  for (NodeIndex i : c.boundary) {
    if (!c.has_pin[i]) throw RejectedInput("no boundary value for node " + std::to_string(i));
    c.lo = std::min(c.lo, c.pin_value[i]);
    c.hi = std::max(c.hi, c.pin_value[i]);
  }
  if (data.value_at_infinity) {
    if (!std::isfinite(*data.value_at_infinity)) throw RejectedInput("value at infinity must be finite");
    c.lo = std::min(c.lo, *data.value_at_infinity);
    c.hi = std::max(c.hi, *data.value_at_infinity);
  }
  return c;
}

// Solves with `free_nodes` unconstrained; every other node keeps its pin,
// or `shell_value` for Omega nodes outside the stage.
ScalarField solve_stage(const WeightedGraph& g, const NodeSet& omega, const NodeSet& free_nodes,
                        const CheckedData& c, double shell_value, const ScalarField* warm,
                        const SolverConfig& config) {
  const std::size_t n = g.node_count();
  EnergyProblem problem;
  problem.fixed.assign(n, true);
  problem.values.assign(n, 0.0);
  const auto omega_mask = omega.mask(n);
  for (NodeIndex i = 0; i < n; ++i) {
    problem.values[i] = omega_mask[i] ? shell_value : c.pin_value[i];
  }
  const double start = 0.5 * (c.lo + c.hi);
  for (NodeIndex i : free_nodes) {
    problem.fixed[i] = false;
    problem.values[i] = warm ? std::clamp((*warm)[i], c.lo, c.hi) : start;
  }
  if (free_nodes.empty()) return ScalarField(problem.values);
  return minimize_energy(g, problem, config).field;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

PerronResult perron_solution(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                             const ExhaustionSchedule& schedule, const SolverConfig& config) {
  schedule.validate();
  const CheckedData c = check_data(graph, omega, data);
  PerronResult result;
  std::vector<NodeSet> stage_free;
  std::vector<double> increments;  // sup-norm distance between consecutive stages
  double scale = 0.0;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    const double r = schedule.radii[j];
    NodeSet omega_j = set_intersection(omega, schedule.ball(graph, r));
    const bool attained = omega_j.size() == omega.size();
    NodeSet free_nodes = omega_j;
    double shell_value = 0.0;
    if (!attained) {
      if (data.shell == ShellMode::free) {
        free_nodes = omega;
      } else if (data.value_at_infinity) {
        shell_value = *data.value_at_infinity;
      } else {
        throw RejectedInput("pinned outer shell needs a value at infinity");
      }
    }
    const ScalarField* warm = result.stage_fields.empty() ? nullptr : &result.stage_fields.back();
    ScalarField field = solve_stage(graph, omega, free_nodes, c, shell_value, warm, config);
    if (!result.stage_fields.empty()) {
      increments.push_back(sup_distance(field, result.stage_fields.back()));
    }
    scale = std::max({scale, std::abs(field.max()), std::abs(field.min())});
    result.stage_radii.push_back(r);
    result.stage_fields.push_back(std::move(field));
    stage_free.push_back(std::move(free_nodes));
    const std::size_t m = increments.size();
    const double tol = schedule.stop_tolerance * std::max(scale, 1e-12);
    if (attained || data.shell == ShellMode::free || (m >= 2 && increments[m - 1] < tol && increments[m - 2] < tol)) {
      result.converged = true;
      break;
    }
  }
  result.last_stage = result.stage_fields.back();
  result.field = result.last_stage;
  const std::size_t s = result.stage_fields.size();
  if (result.converged || s < 4) return result;

  // Nodewise tail fit over the last four stages, for nodes free in all of
  // them with monotone stage values.
  std::vector<double> radii(result.stage_radii.end() - 4, result.stage_radii.end());
  std::vector<double> values(4);
  for (NodeIndex i : stage_free[s - 4]) {
    for (int k = 0; k < 4; ++k) values[k] = result.stage_fields[s - 4 + k][i];
    const bool up = std::is_sorted(values.begin(), values.end());
    const bool down = std::is_sorted(values.rbegin(), values.rend());
    if (!up && !down) continue;
    const auto fit = fit_power_tail(radii, values);
    if (!fit || fit->exponent < 0.1) continue;
    result.field[i] = std::clamp(fit->limit, c.lo, c.hi);
  }
  result.extrapolated = true;
  return result;
}

ScalarField hf_solution(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                        const SolverConfig& config) {
  const CheckedData c = check_data(graph, omega, data);
  if (c.boundary.empty()) throw RejectedInput("Omega has no finite boundary; the free-shell problem is undetermined");
  return solve_stage(graph, omega, omega, c, 0.0, nullptr, config);
}

RegularityReport regularity_probe(const WeightedGraph& graph, const NodeSet& omega, const ProbePoint& point,
                                  const ExhaustionSchedule& schedule, const SolverConfig& config) {
  RegularityReport report;
  BoundaryData data;
  data.shell = ShellMode::pinned;
  if (std::holds_alternative<AtInfinity>(point)) {
    data.value_at_infinity = 0.0;
    data.finite_values = boundary_pins(graph, omega, [&](NodeIndex i) {
      return std::exp(-schedule.distance_from_base(graph, i));
    });
    const PerronResult solved = perron_solution(graph, omega, data, schedule, config);
    for (std::size_t j = 0; j < solved.stage_fields.size(); ++j) {
      const double r = solved.stage_radii[j];
      if (!std::isfinite(r)) continue;
      double probe = 0.0;
      for (NodeIndex i : set_intersection(omega, schedule.ball(graph, r))) {
        if (schedule.distance_from_base(graph, i) >= 0.5 * r) probe = std::max(probe, solved.stage_fields[j][i]);
      }
      report.trace.push_back({r, probe});
    }
  } else {
    const NodeIndex x = std::get<NodeIndex>(point);
    if (!graph.has_positions()) throw RejectedInput("probing a node needs node positions");
    if (!outer_boundary(graph, omega).contains(x)) throw RejectedInput("probed node is not on the boundary of Omega");
    data.value_at_infinity = 1.0;
    data.finite_values = boundary_pins(graph, omega, [&](NodeIndex i) { return std::min(graph.distance(i, x), 1.0); });
    const PerronResult solved = perron_solution(graph, omega, data, schedule, config);
    const double h = graph.min_edge_length();
    for (int k = 4; k >= 1; --k) {
      double probe = 0.0;
      for (NodeIndex i : omega) {
        if (graph.distance(i, x) <= k * h * (1.0 + 1e-12)) probe = std::max(probe, solved.field[i]);
      }
      report.trace.push_back({k * h, probe});
    }
  }
  if (report.trace.empty()) return report;
  const bool at_node = std::holds_alternative<NodeIndex>(point);
  std::vector<double> scales, values;
  for (const ProbeRow& row : report.trace) {
    scales.push_back(at_node ? 1.0 / row.scale : row.scale);
    values.push_back(row.value);
  }
  report.limit = report.trace.back().value;
  if (auto fit = fit_power_tail(scales, values); fit && fit->exponent >= 0.1) report.limit = std::max(fit->limit, 0.0);
  const bool nondecreasing = std::is_sorted(report.trace.begin(), report.trace.end(),
                                            [](const ProbeRow& a, const ProbeRow& b) { return a.value < b.value - 1e-8; });
  if (report.limit < kRegularThreshold) {
    report.verdict = Regularity::regular;
  } else if (report.limit > kIrregularThreshold && nondecreasing) {
    report.verdict = Regularity::irregular;
  }
  return report;
}

PerronBracket bracket_upper_lower(const WeightedGraph& graph, const NodeSet& omega, const BoundaryData& data,
                                  const ExhaustionSchedule& schedule, const SolverConfig& config) {
  const CheckedData c = check_data(graph, omega, data);
  if (!std::isfinite(c.lo)) throw RejectedInput("bracket needs some boundary data");
  BoundaryData low = data, high = data;
  low.shell = high.shell = ShellMode::pinned;
  low.value_at_infinity = c.lo;
  high.value_at_infinity = c.hi;
  PerronBracket bracket;
  bracket.lower = perron_solution(graph, omega, low, schedule, config).field;
  bracket.upper = perron_solution(graph, omega, high, schedule, config).field;
  for (NodeIndex i : omega) bracket.width = std::max(bracket.width, bracket.upper[i] - bracket.lower[i]);
  return bracket;
}

}  // namespace pgreen
