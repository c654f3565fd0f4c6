#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pgreen/analytic_oracles.hpp"
#include "pgreen/capacity.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/random_graphs.hpp"

using namespace pgreen;

namespace {

WeightedGraph unit_path(std::size_t n, double p) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  std::vector<double> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<double>(i);
  return WeightedGraph(std::vector<double>(n, 1.0), edges, p, pos, 1);
}

WeightedGraph line(double h, long half_extent_cells, double p) {
  GridSpec spec;
  spec.dimension = 1;
  spec.spacing = h;
  spec.lower = {-half_extent_cells};
  spec.upper = {half_extent_cells};
  spec.p = p;
  return build_grid(spec);
}

NodeSet interval(const WeightedGraph& g, double r, bool closed) {
  return select_nodes(g, [=](auto x) { return closed ? std::abs(x[0]) <= r + 1e-12 : std::abs(x[0]) < r - 1e-12; });
}

// Brute-force condenser capacity: pins 1 on E, 0 off Omega.
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

TEST_CASE("condenser problem validation") {
  const WeightedGraph g = unit_path(4, 2.0);
  CHECK_THROWS_AS(CondenserProblem(g, NodeSet{0, 3}, NodeSet{0, 1}), RejectedInput);
  CHECK_THROWS_AS(CondenserProblem(g, NodeSet{7}, NodeSet{0, 1}), RejectedInput);
  CHECK_NOTHROW(CondenserProblem(g, NodeSet{1}, NodeSet{1, 2}));
}

TEST_CASE("one-dimensional condenser matches the closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    const WeightedGraph g = line(1.0 / 16, 64, p);
    const CondenserProblem problem(g, interval(g, 1, true), interval(g, 3, false));
    const CapacityReport r = condenser_capacity(problem, ExhaustionSchedule{});
    CHECK(r.value == doctest::Approx(oracle::oned_condenser(p, 1, 3)).epsilon(1e-8));
    CHECK(r.stopping_reason == StopReason::single_solve);
    CHECK_FALSE(r.infinite);
  }
}

TEST_CASE("empty E has zero capacity") {
  const WeightedGraph g = unit_path(5, 2.0);
  const CapacityReport r = condenser_capacity(CondenserProblem(g, NodeSet{}, NodeSet{1, 2, 3}), ExhaustionSchedule{});
  CHECK(r.value == 0.0);
  CHECK(r.stopping_reason == StopReason::empty_set);
}

TEST_CASE("condenser capacities match brute force on small graphs") {
  std::mt19937_64 rng(21);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 4; ++trial) {
      const WeightedGraph g = random_connected_graph(rng, 8, 4, p);
      const NodeSet omega{1, 2, 3, 4, 5, 6};
      const NodeSet e{2, 5};
      const double value = solve_condenser(g, e, omega).value;
      const double brute = brute_condenser(g, e, omega);
      CHECK(value == doctest::Approx(brute).epsilon(1e-4));
    }
  }
}

TEST_CASE("Sobolev capacity") {
  SUBCASE("a single heavy node forced to one") {
    // Node 0 has measure 3 and is joined to a node of measure 1.
    const WeightedGraph g({3.0, 1.0}, {{0, 1, 1e-3}}, 2.0);
    // Optimum of 3 + u^2 + 1e-3 (1-u)^2 is at u = 1e-3/1.001.
    const double u = 1e-3 / (1.0 + 1e-3);
    CHECK(sobolev_capacity(g, NodeSet{0}) == doctest::Approx(3.0 + u * u + 1e-3 * (1 - u) * (1 - u)).epsilon(1e-10));
  }
  SUBCASE("E = all nodes gives the total measure") {
    std::mt19937_64 rng(4);
    const WeightedGraph g = random_connected_graph(rng, 9, 5, 3.0);
    double total = 0.0;
    for (double m : g.node_measure()) total += m;
    CHECK(sobolev_capacity(g, NodeSet::all(9)) == doctest::Approx(total).epsilon(1e-12));
  }
  SUBCASE("five-node path against brute force") {
    const WeightedGraph g = unit_path(5, 2.0);
    ScalarField minimiser;
    const double value = sobolev_capacity(g, NodeSet{2}, {}, &minimiser);
    CHECK(value > 0.0);
    CHECK(value <= 5.0);
    std::vector<bool> free{true, true, false, true, true};
    std::vector<double> start{0, 0, 1, 0, 0}, lo(5, 0.0), hi(5, 1.0);
    const double brute = oracle::brute_force_minimum(g, free, start, lo, hi, std::vector<double>(5, 1.0));
    CHECK(value == doctest::Approx(brute).epsilon(1e-4));
    CHECK(minimiser[2] >= 1.0 - 1e-12);
  }
}

TEST_CASE("D^p capacity") {
  const WeightedGraph g = line(0.25, 16, 2.0);
  const NodeSet e = interval(g, 1, true);
  const NodeSet omega = interval(g, 3, false);
  SUBCASE("F is the complement of a bounded Omega") {
    CHECK(cap_Dp(g, e, omega.complement(g.node_count())) ==
          doctest::Approx(condenser_capacity(CondenserProblem(g, e, omega), {}).value).epsilon(1e-9));
  }
  SUBCASE("empty F") { CHECK(cap_Dp(g, e, NodeSet{}) == 0.0); }
  SUBCASE("overlapping E and F are rejected") {
    CHECK_THROWS_AS(cap_Dp(g, e, NodeSet{e.indices().front()}), RejectedInput);
  }
}

TEST_CASE("exhaustion limit on the line") {
  for (double p : {1.5, 2.0, 3.0}) {
    const WeightedGraph g = line(0.25, 24, p);
    const NodeSet e = interval(g, 1, true);
    const std::vector<NodeSet> stages{interval(g, 2, false), interval(g, 3, false), interval(g, 4, false)};
    const ExhaustionReport r = check_exhaustion_limit(CondenserProblem(g, e, stages.back()), stages);
    CHECK(r.passed());
    REQUIRE(r.stage_values.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(r.stage_values[k] == doctest::Approx(oracle::oned_condenser(p, 1, 2 + k)).epsilon(1e-8));
    const std::vector<NodeSet> constant(3, stages[1]);
    const ExhaustionReport flat = check_exhaustion_limit(CondenserProblem(g, e, stages[1]), constant);
    CHECK(flat.passed());
    CHECK(flat.stage_values.front() == flat.stage_values.back());
  }
}

TEST_CASE("radial annuli converge to the capacity of the unit ball") {
  RadialSpace space;
  space.dimension = 3;
  const WeightedGraph g = build_radial_line(space, 1.0, 64.0, 1.0 / 64);
  const NodeSet e{0};
  std::vector<NodeSet> stages;
  for (double s : {2.0, 4.0, 8.0}) stages.push_back(select_nodes(g, [=](auto x) { return x[0] < s; }));
  stages.push_back(set_difference(NodeSet::all(g.node_count()), NodeSet{g.node_count() - 1}));
  const ExhaustionReport r = check_exhaustion_limit(CondenserProblem(g, e, stages.back()), stages);
  CHECK(r.monotone);
  CHECK(r.stage_values[0] == doctest::Approx(8 * M_PI).epsilon(1e-3));
  CHECK(r.stage_values.back() == doctest::Approx(4 * M_PI).epsilon(0.02));
}

TEST_CASE("unbounded E uses the limit over balls") {
  // Parabolic line: cap([-1,1], (-k,k)) = 2 (k-1)^{1-p} tends to zero.
  const double p = 2.0;
  const WeightedGraph g = line(0.5, 80, p);
  const NodeSet all = NodeSet::all(g.node_count());
  ExhaustionSchedule schedule;
  schedule.radii = {2, 4, 8, 16, 32};
  const CapacityReport two_step = condenser_capacity(CondenserProblem(g, all, all, true), schedule);
  CHECK(two_step.value == 0.0);
  const CapacityReport naive = condenser_capacity_naive(CondenserProblem(g, all, all, true), schedule);
  CHECK(naive.infinite);
}

TEST_CASE("naive and two-step capacities agree for bounded E") {
  std::mt19937_64 rng(8);
  for (double p : {1.5, 2.0, 3.0}) {
    const WeightedGraph g = random_connected_graph(rng, 14, 8, p);
    const NodeSet omega = set_difference(NodeSet::all(14), NodeSet{0, 1});
    const NodeSet e{5, 9};
    const CondenserProblem problem(g, e, omega);
    CHECK(condenser_capacity_naive(problem, {}).value == condenser_capacity(problem, {}).value);
  }
}

TEST_CASE("solid block has the capacity of its boundary") {
  GridSpec spec;
  spec.dimension = 2;
  spec.spacing = 0.25;
  spec.lower = {-8, -8};
  spec.upper = {8, 8};
  for (double p : {1.5, 2.0, 3.0}) {
    spec.p = p;
    const WeightedGraph g = build_grid(spec);
    const NodeSet block = select_nodes(g, [](auto x) { return std::abs(x[0]) <= 0.75 && std::abs(x[1]) <= 0.75; });
    const NodeSet omega = select_nodes(g, [](auto x) { return std::abs(x[0]) < 1.75 && std::abs(x[1]) < 1.75; });
    const NodeSet rim = inner_boundary(g, block);
    CHECK(rim.size() < block.size());
    CHECK(solve_condenser(g, rim, omega).value == doctest::Approx(solve_condenser(g, block, omega).value).epsilon(1e-8));
  }
}

TEST_CASE("warning ring") {
  const std::vector<double> c{1, 2, 2, 2, 2, 2};
  const WarningRing ring = build_warning_ring(c, 3, 2.0);
  REQUIRE(ring.r.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(std::abs(ring.condenser_capacity(j) - 2.0) < 1e-10);
    CHECK(ring.r[j] < ring.s[j]);
    CHECK(ring.r[j] < std::ldexp(1.0, -static_cast<int>(j + 1)));
    // Each inner condenser solves 4 pi (1/r - 1/s)^{-1} = c_j - c_0.
    CHECK(4 * M_PI / (1 / ring.r[j] - 1 / ring.s[j]) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(radial_condenser_capacity(3, 2.0, ring.s1, 1.0) == doctest::Approx(1.0).epsilon(1e-10));

  SUBCASE("targets closer to c0 shrink the inner radii") {
    const WarningRing close = build_warning_ring(std::vector<double>{1, 1.1}, 3, 2.0);
    const WarningRing far = build_warning_ring(std::vector<double>{1, 3}, 3, 2.0);
    CHECK(close.r[0] < far.r[0]);
  }
  SUBCASE("p = n uses the logarithmic branch") {
    const WarningRing log_ring = build_warning_ring(std::vector<double>{1, 2, 2}, 2, 2.0);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(log_ring.condenser_capacity(j) - 2.0) < 1e-10);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(build_warning_ring(std::vector<double>{1, 0.5}, 3, 2.0), RejectedInput);
    CHECK_THROWS_AS(build_warning_ring(std::vector<double>{1, 2}, 2, 3.0), RejectedInput);
  }
}

TEST_CASE("axiom checker reports zero violations and equality cases") {
  std::mt19937_64 rng(12);
  const WeightedGraph g = random_connected_graph(rng, 12, 8, 2.0);
  const NodeSet all = NodeSet::all(12);
  const auto sampler = [&] {
    AxiomSample s;
    s.omega_outer = set_difference(all, NodeSet{0});
    s.omega = random_subset(rng, s.omega_outer, 0.8);
    s.e1 = random_subset(rng, s.omega, 0.4);
    s.e2 = s.e1;
    return s;
  };
  CHECK(check_capacity_axioms(g, sampler, 20).passed());
}
