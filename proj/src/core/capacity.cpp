#include "pgreen/capacity.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "pgreen/analytic_oracles.hpp"
#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/limits.hpp"

namespace pgreen {

CondenserProblem::CondenserProblem(const WeightedGraph& ambient, NodeSet e, NodeSet omega, bool e_unbounded)
    : ambient_(&ambient), e_(std::move(e)), omega_(std::move(omega)), e_unbounded_(e_unbounded) {
  e_.validate(ambient);
  omega_.validate(ambient);
  if (!e_.is_subset_of(omega_)) {
    throw RejectedInput("conflicting pins: E contains nodes outside Omega");
  }
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::single_solve:
      return "single_solve";
    case StopReason::empty_set:
      return "empty_set";
    case StopReason::stopping_rule:
      return "stopping_rule";
    case StopReason::set_exhausted:
      return "set_exhausted";
    case StopReason::schedule_exhausted:
      return "schedule_exhausted";
    case StopReason::diverged:
      return "diverged";
    case StopReason::infeasible:
      return "infeasible";
  }
  return "unknown";
}

CondenserSolve solve_condenser(const WeightedGraph& graph, const NodeSet& e, const NodeSet& omega,
                               const SolverConfig& config, const ScalarField* warm) {
  const std::size_t n = graph.node_count();
  if (!e.is_subset_of(omega)) throw RejectedInput("conflicting pins: E contains nodes outside Omega");
  if (e.empty()) return {0.0, ScalarField::constant(n, 0.0)};

  EnergyProblem prob;
  prob.fixed.assign(n, true);
  prob.values.assign(n, 0.0);
  for (NodeIndex i : omega) {
    prob.fixed[i] = false;
    prob.values[i] = warm ? std::clamp((*warm)[i], 0.0, 1.0) : 0.5;
  }
  for (NodeIndex i : e) {
    prob.fixed[i] = true;
    prob.values[i] = 1.0;
  }
  SolveResult solved = minimize_energy(graph, prob, config);
  const double value = solved.energy < kZeroCapacity ? 0.0 : solved.energy;
  return {value, std::move(solved.field)};
}

double sobolev_capacity(const WeightedGraph& graph, const NodeSet& e, const SolverConfig& config,
                        ScalarField* minimizer) {
  e.validate(graph);
  if (e.empty()) throw RejectedInput("Sobolev capacity needs a nonempty set");
  const std::size_t n = graph.node_count();
  EnergyProblem prob;
  prob.fixed = e.mask(n);
  prob.values.assign(n, 0.5);
  for (NodeIndex i : e) prob.values[i] = 1.0;
  prob.mass.assign(graph.node_measure().begin(), graph.node_measure().end());
  SolveResult solved = minimize_energy(graph, prob, config);
  if (minimizer) *minimizer = solved.field;
  return solved.energy + solved.mass_energy;
}

namespace {

void finish_with_tail(CapacityReport& report) {
  if (auto fit = fit_power_tail(report.stage_radii, report.stage_values)) report.extrapolated = fit->limit;
}

}  // namespace

CapacityReport condenser_capacity(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                                  const SolverConfig& config) {
  const WeightedGraph& g = problem.ambient();
  CapacityReport report;
  if (problem.e().empty()) {
    report.potential = ScalarField::constant(g.node_count(), 0.0);
    report.stopping_reason = StopReason::empty_set;
    return report;
  }
  if (!problem.e_unbounded()) {
    auto solved = solve_condenser(g, problem.e(), problem.omega(), config);
    report.value = solved.value;
    report.potential = std::move(solved.potential);
    report.stage_values = {report.value};
    return report;
  }

  schedule.validate();
  report.converged = false;
  report.stopping_reason = StopReason::schedule_exhausted;
  std::optional<ScalarField> warm;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    const double radius = schedule.radii[j];
    const NodeSet ej = set_intersection(problem.e(), schedule.ball(g, radius));
    auto solved = solve_condenser(g, ej, problem.omega(), config, warm ? &*warm : nullptr);
    report.stage_radii.push_back(radius);
    report.stage_values.push_back(solved.value);
    report.potential = solved.potential;
    warm = std::move(solved.potential);
    if (ej.size() == problem.e().size()) {
      report.converged = true;
      report.stopping_reason = StopReason::set_exhausted;
      break;
    }
    if (stopping_rule_met(report.stage_values, schedule.stop_tolerance)) {
      report.converged = true;
      report.stopping_reason = StopReason::stopping_rule;
      break;
    }
  }
  report.value = report.stage_values.back();
  finish_with_tail(report);
  return report;
}

CapacityReport condenser_capacity_naive(const CondenserProblem& problem, const ExhaustionSchedule& schedule,
                                        const SolverConfig& config) {
  if (!problem.e_unbounded()) return condenser_capacity(problem, schedule, config);
  schedule.validate();
  const WeightedGraph& g = problem.ambient();
  const double outer = schedule.radii[schedule.stage_count() - 1];
  const NodeSet inside = schedule.ball(g, outer);
  const NodeSet shell = inside.complement(g.node_count());

  CapacityReport report;
  report.converged = false;
  if (!set_intersection(problem.e(), shell).empty()) {
    report.infinite = true;
    report.value = kInfinity;
    report.stopping_reason = StopReason::infeasible;
    report.potential = ScalarField::indicator(g.node_count(), problem.e());
    return report;
  }
  const NodeSet omega = set_intersection(problem.omega(), inside);
  std::optional<ScalarField> warm;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    const NodeSet ej = set_intersection(problem.e(), schedule.ball(g, schedule.radii[j]));
    auto solved = solve_condenser(g, ej, omega, config, warm ? &*warm : nullptr);
    report.stage_radii.push_back(schedule.radii[j]);
    report.stage_values.push_back(solved.value);
    report.potential = solved.potential;
    warm = std::move(solved.potential);
    const double first = report.stage_values.front();
    if (first > 0.0 && solved.value > kNaiveDivergenceFactor * first) {
      report.infinite = true;
      report.value = kInfinity;
      report.stopping_reason = StopReason::diverged;
      return report;
    }
  }
  auto full = solve_condenser(g, problem.e(), omega, config, warm ? &*warm : nullptr);
  report.value = full.value;
  report.potential = std::move(full.potential);
  report.converged = true;
  report.stopping_reason = StopReason::single_solve;
  return report;
}

double cap_Dp(const WeightedGraph& graph, const NodeSet& e, const NodeSet& f, const SolverConfig& config,
              ScalarField* minimizer) {
  e.validate(graph);
  f.validate(graph);
  if (!set_intersection(e, f).empty()) throw RejectedInput("cap_Dp needs disjoint sets E and F");
  const std::size_t n = graph.node_count();
  if (e.empty() || f.empty()) {
    // One of the constant fields 0 or 1 is admissible.
    if (minimizer) *minimizer = ScalarField::constant(n, e.empty() ? 0.0 : 1.0);
    return 0.0;
  }
  std::vector<Pin> pins;
  for (NodeIndex i : e) pins.push_back({i, 1.0});
  for (NodeIndex i : f) pins.push_back({i, 0.0});
  SolveResult solved = minimize_energy(graph, EnergyProblem::dirichlet(n, pins), config);
  if (minimizer) *minimizer = solved.field;
  return solved.energy < kZeroCapacity ? 0.0 : solved.energy;
}

AxiomReport check_capacity_axioms(const WeightedGraph& graph, const std::function<AxiomSample()>& sampler, int count,
                                  const SolverConfig& config, double tolerance) {
  AxiomReport report;
  const auto cap = [&](const NodeSet& e, const NodeSet& omega) { return solve_condenser(graph, e, omega, config).value; };
  for (int k = 0; k < count; ++k) {
    AxiomSample s = sampler();
    if (!s.e1.is_subset_of(s.omega) || !s.e2.is_subset_of(s.omega) || !s.omega.is_subset_of(s.omega_outer)) {
      throw RejectedInput("axiom sampler must yield E1, E2 inside Omega inside Omega'");
    }
    ++report.samples;
    const NodeSet uni = set_union(s.e1, s.e2);
    const NodeSet inter = set_intersection(s.e1, s.e2);
    const double c1 = cap(s.e1, s.omega);
    const double c2 = cap(s.e2, s.omega);
    const double cu = cap(uni, s.omega);
    const double ci = cap(inter, s.omega);
    const double ci_outer = cap(inter, s.omega_outer);

    const auto check = [&](const char* name, double lhs, double rhs) {
      if (lhs > rhs + tolerance) report.violations.push_back({name, s, lhs, rhs});
    };
    check("monotonicity(E1^E2,Omega' <= E1,Omega)", ci_outer, c1);
    check("monotonicity(E1,Omega <= E1vE2,Omega)", c1, cu);
    check("strong_subadditivity", cu + ci, c1 + c2);
    check("finite_subadditivity", cu, c1 + c2);
  }
  return report;
}

ExhaustionReport check_exhaustion_limit(const CondenserProblem& problem, std::span<const NodeSet> omega_stages,
                                        const SolverConfig& config, double tolerance) {
  if (omega_stages.empty()) throw RejectedInput("exhaustion check needs at least one stage");
  const WeightedGraph& g = problem.ambient();
  if (!problem.e().is_subset_of(omega_stages.front())) throw RejectedInput("E must lie inside the first stage");
  ExhaustionReport report;
  report.monotone = true;
  std::optional<ScalarField> warm;
  for (std::size_t j = 0; j < omega_stages.size(); ++j) {
    if (j > 0 && !omega_stages[j - 1].is_subset_of(omega_stages[j])) {
      throw RejectedInput("Omega stages must be nested");
    }
    auto solved = solve_condenser(g, problem.e(), omega_stages[j], config, warm ? &*warm : nullptr);
    if (!report.stage_values.empty() &&
        solved.value > report.stage_values.back() + tolerance * std::max(1.0, report.stage_values.back())) {
      report.monotone = false;
    }
    report.stage_values.push_back(solved.value);
    warm = std::move(solved.potential);
  }
  report.reference = solve_condenser(g, problem.e(), problem.omega(), config).value;
  report.matches =
      std::abs(report.stage_values.back() - report.reference) <= tolerance * std::max(1.0, report.reference);
  return report;
}

namespace {

// Root of f(x) = target for f increasing in log x, bracketed by [lo, hi].
template <class F>
double solve_log(F&& f, double lo, double hi, double target) {
  using namespace boost::math::tools;
  std::uintmax_t iterations = 200;
  const auto [a, b] = toms748_solve([&](double t) { return f(std::exp(t)) - target; }, std::log(lo), std::log(hi),
                                    eps_tolerance<double>(std::numeric_limits<double>::digits - 3), iterations);
  return std::exp(0.5 * (a + b));
}

}  // namespace

double WarningRing::condenser_capacity(std::size_t j) const {
  return radial_condenser_capacity(n, p, r.at(j), s.at(j)) + radial_condenser_capacity(n, p, s1, 1.0);
}

WarningRing build_warning_ring(std::span<const double> c, int n, double p) {
  if (c.size() < 2) throw RejectedInput("warning ring needs c_0 and at least one c_j");
  if (!(p > 1.0) || !(p <= n)) throw RejectedInput("warning ring needs 1 < p <= n");
  const double c0 = c[0];
  if (!(c0 > 0.0)) throw RejectedInput("c_0 must be positive");
  WarningRing ring{n, p, c0, 0.0, {}, {}, {}};
  const auto cap = [&](double r, double s) { return radial_condenser_capacity(n, p, r, s); };

  // cap(B_s, B_1) increases from 0 (s -> 0) to inf (s -> 1).
  const double tiny = 1e-300;
  ring.s1 = solve_log([&](double s) { return cap(s, 1.0); }, tiny, 1.0 - 1e-15, c0);

  double s_prev = ring.s1;
  double r_prev = ring.s1;
  for (std::size_t j = 1; j < c.size(); ++j) {
    const double target = c[j] - c0;
    if (!(target > 0.0)) {
      throw RejectedInput("c_" + std::to_string(j) + " = " + format_real(c[j]) + " is not above c_0; attainable range is (" +
                          format_real(c0) + ", inf)");
    }
    double r = 0.0;
    if (j == 1) {
      r = solve_log([&](double x) { return cap(x, s_prev); }, tiny, s_prev * (1.0 - 1e-15), target);
    } else {
      // r_j below min(r_{j-1}, 2^-j) with cap(B_{r_j}, B_{s_{j-1}}) < target.
      r = 0.5 * std::min(r_prev, std::ldexp(1.0, -static_cast<int>(j)));
      while (cap(r, s_prev) >= target) {
        r *= 0.5;
        if (r < 1e-290) {
          throw RejectedInput("target c_" + std::to_string(j) + " - c_0 is below the attainable range");
        }
      }
    }
    // s in (r, s_prev]: cap(B_r, B_s) decreases in s.
    const double s = j == 1 ? s_prev
                            : solve_log([&](double x) { return -cap(r, x); }, r * (1.0 + 1e-15), s_prev, -target);
    ring.targets.push_back(c[j]);
    ring.r.push_back(r);
    ring.s.push_back(s);
    r_prev = r;
    s_prev = s;
  }
  return ring;
}

}  // namespace pgreen
