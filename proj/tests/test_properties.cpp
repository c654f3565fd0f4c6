#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pgreen/capacity.hpp"
#include "pgreen/perron.hpp"
#include "pgreen/potential_green.hpp"
#include "pgreen/random_graphs.hpp"

using namespace pgreen;

namespace {

constexpr int kSamples = 200;
constexpr double kAxiomTolerance = 1e-7;
constexpr double kExponents[] = {1.5, 2.0, 3.0};

double cap(const WeightedGraph& g, const NodeSet& e, const NodeSet& omega) { return solve_condenser(g, e, omega).value; }

double brute_condenser(const WeightedGraph& g, const NodeSet& e, const NodeSet& omega) {
  const std::size_t n = g.node_count();
  std::vector<bool> free(n, false);
  std::vector<double> start(n, 0.0), lo(n, 0.0), hi(n, 1.0);
  for (NodeIndex i = 0; i < n; ++i) {
    if (e.contains(i)) start[i] = 1.0;
    else if (omega.contains(i)) free[i] = true;
  }
  return oracle::brute_force_minimum(g, free, start, lo, hi);
}

}  // namespace

TEST_CASE("capacity axioms on random graphs") {
  std::mt19937_64 rng(1001);
  int violations = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double p = kExponents[k % 3];
    const WeightedGraph g = random_connected_graph(rng, 12, 8, p);
    const NodeSet all = NodeSet::all(12);
    const NodeSet omega_outer = set_difference(all, NodeSet{0});
    const NodeSet omega = random_subset(rng, omega_outer, 0.8);
    const NodeSet e1 = random_subset(rng, omega, 0.4);
    const NodeSet e2 = random_subset(rng, omega, 0.4);
    const NodeSet e12 = set_union(e1, e2);

    const double c1 = cap(g, e1, omega), c2 = cap(g, e2, omega);
    const double c_union = cap(g, e12, omega), c_meet = cap(g, set_intersection(e1, e2), omega);
    // Monotone in E and antitone in Omega.
    if (cap(g, e1, omega_outer) > c_union + kAxiomTolerance) ++violations;
    if (cap(g, e1, omega_outer) > c1 + kAxiomTolerance) ++violations;
    // Strong and finite subadditivity.
    if (c_union + c_meet > c1 + c2 + kAxiomTolerance) ++violations;
    if (c_union > c1 + c2 + kAxiomTolerance) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("library axiom checker agrees") {
  std::mt19937_64 rng(1002);
  int samples = 0, violations = 0;
  for (double p : kExponents) {
    const WeightedGraph g = random_connected_graph(rng, 12, 8, p);
    const NodeSet omega_outer = set_difference(NodeSet::all(12), NodeSet{0});
    const auto sampler = [&] {
      AxiomSample s;
      s.omega_outer = omega_outer;
      s.omega = random_subset(rng, omega_outer, 0.8);
      s.e1 = random_subset(rng, s.omega, 0.4);
      s.e2 = random_subset(rng, s.omega, 0.4);
      return s;
    };
    const AxiomReport r = check_capacity_axioms(g, sampler, kSamples / 3 + 1);
    samples += r.samples;
    violations += static_cast<int>(r.violations.size());
  }
  CHECK(samples >= kSamples);
  CHECK(violations == 0);
}

TEST_CASE("potential stages increase nodewise") {
  std::mt19937_64 rng(1003);
  int decreases = 0;
  for (int k = 0; k < kSamples; ++k) {
    const WeightedGraph g = random_connected_graph(rng, 12, 6, kExponents[k % 3]);
    const NodeSet omega = set_difference(NodeSet::all(12), NodeSet{1});
    ExhaustionSchedule schedule;
    schedule.base_node = 0;
    schedule.radii = {0.3, 0.6, 0.9, kInfinity};
    // Stage fields straight from the solver, compared here rather than inside
    // capacitary_potential.
    std::optional<ScalarField> previous;
    for (double r : schedule.radii) {
      const NodeSet ball = schedule.ball(g, r);
      const ScalarField u = solve_condenser(g, set_intersection(NodeSet{0}, ball), set_intersection(omega, ball)).potential;
      if (previous) {
        for (NodeIndex i = 0; i < 12; ++i) {
          if (u[i] < (*previous)[i] - 1e-9) ++decreases;
        }
      }
      previous = u;
    }
  }
  CHECK(decreases == 0);
}

TEST_CASE("comparison and maximum principles") {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> value(-1.0, 1.0), bump(0.0, 0.5);
  double worst_order = 0.0, worst_range = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const WeightedGraph g = random_connected_graph(rng, 12, 6, kExponents[k % 3]);
    const NodeSet interior = set_difference(NodeSet::all(12), NodeSet{0, 1, 2});
    BoundaryData low, high;
    double lo = kInfinity, hi = -kInfinity;
    for (NodeIndex i : outer_boundary(g, interior)) {
      const double v = value(rng);
      low.finite_values.push_back({i, v});
      high.finite_values.push_back({i, v + bump(rng)});
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const ScalarField a = hf_solution(g, interior, low);
    const ScalarField b = hf_solution(g, interior, high);
    for (NodeIndex i : interior) {
      worst_order = std::max(worst_order, a[i] - b[i]);
      worst_range = std::max({worst_range, a[i] - hi, lo - a[i]});
    }
  }
  CHECK(worst_order <= 1e-8);
  CHECK(worst_range <= 1e-8);
}

TEST_CASE("eight-node capacities match the brute-force value grid") {
  std::mt19937_64 rng(1005);
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    const WeightedGraph g = random_connected_graph(rng, 8, 4, kExponents[k % 3]);
    const NodeSet omega = set_difference(NodeSet::all(8), NodeSet{0});
    NodeSet e = random_subset(rng, omega, 0.3);
    if (e.empty()) e = NodeSet{3};
    const double value = cap(g, e, omega);
    worst = std::max(worst, std::abs(value - brute_condenser(g, e, omega)) / std::max(value, 1.0));
  }
  CHECK(worst < 1e-4);
}
