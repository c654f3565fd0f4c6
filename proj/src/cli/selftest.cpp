#include <algorithm>
#include <cmath>
#include <fmt/core.h>
#include <random>

#include "pgreen/analytic_oracles.hpp"
#include "pgreen/capacity.hpp"
#include "pgreen/cli/commands.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/perron.hpp"
#include "pgreen/potential_green.hpp"
#include "pgreen/random_graphs.hpp"

namespace pgreen::cli {

namespace {

constexpr double kExponents[] = {1.5, 2.0, 3.0};

SelftestLine axioms(std::mt19937_64& rng, int samples) {
  int violations = 0, total = 0;
  for (double p : kExponents) {
    const WeightedGraph g = random_connected_graph(rng, 10, 8, p);
    const NodeSet all = NodeSet::all(g.node_count());
    const auto sampler = [&] {
      AxiomSample s;
      s.omega_outer = set_difference(all, NodeSet{0});
      s.omega = random_subset(rng, s.omega_outer, 0.8);
      s.e1 = random_subset(rng, s.omega, 0.4);
      s.e2 = random_subset(rng, s.omega, 0.4);
      return s;
    };
    const AxiomReport r = check_capacity_axioms(g, sampler, samples, {}, 1e-7);
    violations += static_cast<int>(r.violations.size());
    total += r.samples;
  }
  return {"capacity_axioms", violations == 0, fmt::format("{} samples, {} violations", total, violations)};
}

SelftestLine green_identities(std::mt19937_64& rng, int samples) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double p = kExponents[k % 3];
    const WeightedGraph g = random_connected_graph(rng, 12, 6, p);
    const NodeSet omega = set_difference(NodeSet::all(g.node_count()), NodeSet{0});
    const NodeIndex x0 = g.node_count() - 1;
    const SingularResult s = singular_function(g, omega, x0, ExhaustionSchedule{});
    if (!s.singular) return {"green_normalisation", false, "no singular function on a finite graph"};
    const GreenFunction green = green_normalize(*s.singular);
    const double point_cap = solve_condenser(g, NodeSet{x0}, omega).value;
    worst = std::max(worst, std::abs(point_cap * std::pow(green.peak, p - 1.0) - 1.0));
    worst = std::max(worst, std::abs(green_energy_slab(green, 0.0, green.peak) - green.peak) / green.peak);
  }
  return {"green_normalisation", worst < 1e-7, fmt::format("max deviation {:.3g}", worst)};
}

SelftestLine potential_monotone(std::mt19937_64& rng, int samples) {
  int failures = 0;
  for (int k = 0; k < samples; ++k) {
    const WeightedGraph g = random_connected_graph(rng, 12, 6, kExponents[k % 3]);
    const NodeSet omega = set_difference(NodeSet::all(g.node_count()), NodeSet{1});
    ExhaustionSchedule schedule;
    schedule.base_node = 0;
    schedule.radii = {0.3, 0.6, 0.9, kInfinity};
    try {
      capacitary_potential(CondenserProblem(g, NodeSet{0}, omega), schedule);
    } catch (const ConsistencyError&) {
      ++failures;
    }
  }
  return {"potential_stage_monotonicity", failures == 0, fmt::format("{} failures", failures)};
}

SelftestLine comparison(std::mt19937_64& rng, int samples) {
  double worst = 0.0;
  std::uniform_real_distribution<double> value(-1.0, 1.0), bump(0.0, 0.5);
  for (int k = 0; k < samples; ++k) {
    const WeightedGraph g = random_connected_graph(rng, 12, 6, kExponents[k % 3]);
    const NodeSet interior = set_difference(NodeSet::all(g.node_count()), NodeSet{0, 1, 2});
    BoundaryData low, high;
    for (NodeIndex i : outer_boundary(g, interior)) {
      const double v = value(rng);
      low.finite_values.push_back({i, v});
      high.finite_values.push_back({i, v + bump(rng)});
    }
    const ScalarField a = hf_solution(g, interior, low);
    const ScalarField b = hf_solution(g, interior, high);
    double lo = kInfinity, hi = -kInfinity;
    for (const Pin& pin : low.finite_values) {
      lo = std::min(lo, pin.value);
      hi = std::max(hi, pin.value);
    }
    for (NodeIndex i : interior) {
      worst = std::max(worst, a[i] - b[i]);
      worst = std::max({worst, a[i] - hi, lo - a[i]});
    }
  }
  return {"comparison_and_maximum_principle", worst <= 1e-8, fmt::format("max violation {:.3g}", worst)};
}

SelftestLine oned_closed_form() {
  double worst = 0.0;
  for (double p : kExponents) {
    GridSpec spec;
    spec.dimension = 1;
    spec.spacing = 0.25;
    spec.lower = {-16};
    spec.upper = {16};
    spec.p = p;
    const WeightedGraph g = build_grid(spec);
    const NodeSet e = select_nodes(g, [](auto x) { return std::abs(x[0]) <= 1.0; });
    const NodeSet omega = select_nodes(g, [](auto x) { return std::abs(x[0]) < 3.0; });
    const double cap = solve_condenser(g, e, omega).value;
    worst = std::max(worst, std::abs(cap - 2.0 * std::pow(2.0, 1.0 - p)));
  }
  return {"oned_condenser_closed_form", worst < 1e-8, fmt::format("max error {:.3g}", worst)};
}

SelftestLine radial_oracle(std::mt19937_64& rng, int samples) {
  double worst = 0.0;
  std::uniform_int_distribution<int> dim(2, 5);
  std::uniform_real_distribution<double> expo(1.2, 4.5), radius(0.2, 2.0), ratio(1.1, 5.0);
  for (int k = 0; k < samples; ++k) {
    const int n = dim(rng);
    const double p = expo(rng), r = radius(rng), s = r * ratio(rng);
    const double closed = radial_condenser_capacity(n, p, r, s);
    const double quad = radial_condenser_capacity(n, p, r, s, {});
    worst = std::max(worst, std::abs(closed - quad) / closed);
  }
  return {"radial_closed_form_vs_quadrature", worst < 1e-10, fmt::format("max relative error {:.3g}", worst)};
}

SelftestLine warning_ring() {
  const std::vector<double> c{1.0, 2.0, 2.0, 2.0, 2.0, 2.0};
  const WarningRing ring = build_warning_ring(c, 3, 2.0);
  double worst = 0.0;
  bool nested = true;
  for (std::size_t j = 0; j < ring.targets.size(); ++j) {
    worst = std::max(worst, std::abs(ring.condenser_capacity(j) - ring.targets[j]));
    nested = nested && ring.r[j] < ring.s[j] && ring.r[j] < std::ldexp(1.0, -static_cast<int>(j + 1));
    if (j > 0) nested = nested && ring.s[j] < ring.s[j - 1] && ring.r[j] < ring.r[j - 1];
  }
  return {"warning_ring_substitution", worst < 1e-10 && nested, fmt::format("max error {:.3g}", worst)};
}

SelftestLine classifier() {
  bool ok = true;
  for (int n : {2, 3, 4}) {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const auto r = classify_hyperbolicity(lebesgue_growth(n), p);
      ok = ok && (r.verdict == Hyperbolicity::hyperbolic) == (p < n);
    }
  }
  return {"hyperbolicity_rn_rule", ok, ""};
}

}  // namespace

std::vector<SelftestLine> run_selftest(unsigned long long seed, int samples) {
  std::mt19937_64 rng(seed);
  const int per = std::max(1, samples);
  return {axioms(rng, per),
          green_identities(rng, per),
          potential_monotone(rng, per),
          comparison(rng, per),
          oned_closed_form(),
          radial_oracle(rng, per),
          warning_ring(),
          classifier()};
}

}  // namespace pgreen::cli
