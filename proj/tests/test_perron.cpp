#include <doctest.h>

#include <cmath>
#include <random>

#include "pgreen/errors.hpp"
#include "pgreen/perron.hpp"
#include "pgreen/random_graphs.hpp"

using namespace pgreen;

namespace {

WeightedGraph exterior_ball_line(double r_max, double h) {
  RadialSpace space;
  space.dimension = 3;
  return build_radial_line(space, 1.0, r_max, h);
}

NodeSet without_first(const WeightedGraph& g) { return set_difference(NodeSet::all(g.node_count()), NodeSet{0}); }

NodeIndex node_at_radius(const WeightedGraph& g, double rho) {
  NodeIndex best = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (std::abs(g.position(i)[0] - rho) < std::abs(g.position(best)[0] - rho)) best = i;
  }
  return best;
}

WeightedGraph line(double h, long lo, long hi, double p) {
  GridSpec spec;
  spec.dimension = 1;
  spec.spacing = h;
  spec.lower = {lo};
  spec.upper = {hi};
  spec.p = p;
  return build_grid(spec);
}

}  // namespace

TEST_CASE("exterior ball: pinned field approaches c + (1 - c)/|x|") {
  const WeightedGraph g = exterior_ball_line(64.0, 1.0 / 16);
  const NodeSet omega = without_first(g);
  ExhaustionSchedule schedule;
  schedule.radii = {8, 16, 32, 64};
  const NodeIndex at2 = node_at_radius(g, 2.0);
  for (double c : {0.0, 0.5}) {
    BoundaryData data;
    data.finite_values = boundary_pins(g, omega, [](NodeIndex) { return 1.0; });
    data.value_at_infinity = c;
    const PerronResult r = perron_solution(g, omega, data, schedule);
    const double expected = c + (1 - c) / 2;
    CHECK(std::abs(r.field[at2] - expected) < 0.01 * expected);
    // f(inf) below f: each wider stage sees a shell below its own field, so
    // raw stages increase in the truncation radius.
    for (std::size_t j = 1; j < r.stage_fields.size(); ++j) CHECK(r.stage_fields[j][at2] >= r.stage_fields[j - 1][at2] - 1e-12);
    // Each pinned stage is exactly c + (1-c)(1/rho - 1/R)/(1 - 1/R).
    const double R = r.stage_radii.back();
    CHECK(r.last_stage[at2] == doctest::Approx(c + (1 - c) * (0.5 - 1 / R) / (1 - 1 / R)).epsilon(1e-3));
  }
}

TEST_CASE("free shell gives Hf = 1 for every truncation") {
  for (double r_max : {8.0, 32.0, 64.0}) {
    const WeightedGraph g = exterior_ball_line(r_max, 1.0 / 16);
    const NodeSet omega = without_first(g);
    BoundaryData data;
    data.finite_values = boundary_pins(g, omega, [](NodeIndex) { return 1.0; });
    data.value_at_infinity = 0.0;
    const ScalarField u = hf_solution(g, omega, data);
    for (NodeIndex i = 0; i < g.node_count(); ++i) CHECK(std::abs(u[i] - 1.0) < 1e-9);
  }
}

TEST_CASE("constant data gives a constant field") {
  std::mt19937_64 rng(2);
  const WeightedGraph g = random_connected_graph(rng, 15, 8, 3.0);
  const NodeSet omega = set_difference(NodeSet::all(15), NodeSet{0, 1, 2});
  BoundaryData data;
  data.finite_values = boundary_pins(g, omega, [](NodeIndex) { return 0.7; });
  data.value_at_infinity = 0.7;
  const PerronResult r = perron_solution(g, omega, data, ExhaustionSchedule{});
  for (NodeIndex i : omega) CHECK(r.field[i] == doctest::Approx(0.7).epsilon(1e-10));
  const PerronBracket b = bracket_upper_lower(g, omega, data, ExhaustionSchedule{});
  CHECK(b.width < 1e-10);
  CHECK(b.label.find("heuristic") != std::string::npos);

  SUBCASE("bounded Omega: Hf equals Pf") {
    BoundaryData varied;
    varied.finite_values = boundary_pins(g, omega, [](NodeIndex i) { return 0.1 * static_cast<double>(i); });
    const ScalarField hf = hf_solution(g, omega, varied);
    const PerronResult pf = perron_solution(g, omega, varied, ExhaustionSchedule{});
    for (NodeIndex i = 0; i < 15; ++i) CHECK(hf[i] == doctest::Approx(pf.field[i]).epsilon(1e-9));
  }
}

TEST_CASE("single boundary point gives the constant f(a)") {
  const WeightedGraph g = line(0.5, 0, 40, 2.0);
  const NodeSet omega = without_first(g);
  BoundaryData data;
  data.finite_values = {{0, 0.3}};
  const ScalarField u = hf_solution(g, omega, data);
  for (NodeIndex i = 0; i < g.node_count(); ++i) CHECK(u[i] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("rejections") {
  const WeightedGraph g = exterior_ball_line(8.0, 0.5);
  const NodeSet all = NodeSet::all(g.node_count());
  const NodeSet omega = without_first(g);
  BoundaryData nothing;
  CHECK_THROWS_AS(perron_solution(g, all, nothing, ExhaustionSchedule{}), RejectedInput);
  CHECK_THROWS_AS(hf_solution(g, all, nothing), RejectedInput);
  BoundaryData missing;
  missing.value_at_infinity = 0.0;
  CHECK_THROWS_AS(perron_solution(g, omega, missing, ExhaustionSchedule{}), RejectedInput);
  BoundaryData inside;
  inside.finite_values = {{0, 1.0}, {3, 1.0}};
  inside.value_at_infinity = 0.0;
  CHECK_THROWS_AS(perron_solution(g, omega, inside, ExhaustionSchedule{}), RejectedInput);
  BoundaryData no_infinity;
  no_infinity.finite_values = {{0, 1.0}};
  ExhaustionSchedule truncated;
  truncated.radii = {4.0};
  CHECK_THROWS_AS(perron_solution(g, omega, no_infinity, truncated), RejectedInput);
}

TEST_CASE("comparison principle for ordered data") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> value(-1, 1), bump(0, 0.3);
  for (double p : {1.5, 2.0, 3.0}) {
    const WeightedGraph g = random_connected_graph(rng, 16, 10, p);
    const NodeSet omega = set_difference(NodeSet::all(16), NodeSet{0, 1, 2, 3});
    BoundaryData low, high;
    for (NodeIndex i : outer_boundary(g, omega)) {
      const double v = value(rng);
      low.finite_values.push_back({i, v});
      high.finite_values.push_back({i, v + bump(rng)});
    }
    const ScalarField a = perron_solution(g, omega, low, ExhaustionSchedule{}).field;
    const ScalarField b = perron_solution(g, omega, high, ExhaustionSchedule{}).field;
    for (NodeIndex i : omega) CHECK(a[i] <= b[i] + 1e-8);
  }
}

TEST_CASE("regularity of infinity") {
  SUBCASE("hyperbolic radial surrogate: regular") {
    const WeightedGraph g = exterior_ball_line(64.0, 1.0 / 16);
    ExhaustionSchedule schedule;
    schedule.radii = {8, 16, 32, 64};
    const RegularityReport r = regularity_probe(g, without_first(g), AtInfinity{}, schedule);
    CHECK(r.verdict == Regularity::regular);
    CHECK(r.trace.size() == 4);
  }
  SUBCASE("parabolic line without a point: irregular") {
    const WeightedGraph g = line(0.5, -128, 128, 2.0);
    const NodeIndex origin = 128;
    const NodeSet omega = set_difference(NodeSet::all(g.node_count()), NodeSet{origin});
    ExhaustionSchedule schedule;
    schedule.radii = {8, 16, 32, 64};
    const RegularityReport r = regularity_probe(g, omega, AtInfinity{}, schedule);
    CHECK(r.verdict == Regularity::irregular);
    for (const ProbeRow& row : r.trace) CHECK(row.value == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("a node on a fat boundary is regular") {
  GridSpec spec;
  spec.dimension = 2;
  spec.spacing = 1.0 / 32;
  spec.lower = {-32, -32};
  spec.upper = {32, 32};
  const WeightedGraph g = build_grid(spec);
  const NodeSet omega = select_nodes(g, [](auto x) { return x[0] < -1e-12 && x[0] > -0.75 && std::abs(x[1]) < 0.75; });
  const NodeIndex origin = 32 * 65 + 32;
  REQUIRE(g.norm(origin) == 0.0);
  const RegularityReport r = regularity_probe(g, omega, origin, ExhaustionSchedule{});
  CHECK(r.verdict == Regularity::regular);
  CHECK_THROWS_AS(regularity_probe(g, omega, NodeIndex{0}, ExhaustionSchedule{}), RejectedInput);
}

TEST_CASE("bracket on the exterior ball") {
  const WeightedGraph g = exterior_ball_line(32.0, 1.0 / 16);
  const NodeSet omega = without_first(g);
  BoundaryData data;
  data.finite_values = boundary_pins(g, omega, [](NodeIndex) { return 1.0; });
  data.finite_values.front().value = 1.0;
  data.value_at_infinity = 0.0;
  ExhaustionSchedule schedule;
  schedule.radii = {8, 16, 32};
  // Data range is {0 at infinity, 1 on the sphere}: width at |x|=2 is about 1/2.
  const PerronBracket b = bracket_upper_lower(g, omega, data, schedule);
  const NodeIndex at2 = node_at_radius(g, 2.0);
  CHECK(b.upper[at2] - b.lower[at2] == doctest::Approx(0.5).epsilon(0.05));
  for (NodeIndex i : omega) CHECK(b.lower[i] <= b.upper[i] + 1e-12);
}

TEST_CASE("parabolic line with indicator data: lower solve tends to one") {
  // f = 1 on K = {0}, f(inf) = 0: every pinned stage is the tent 1 - |x|/r,
  // so the value at a fixed node rises to 1 as r grows.
  const WeightedGraph g = line(0.5, -128, 128, 2.0);
  const NodeIndex origin = 128;
  const NodeSet omega = set_difference(NodeSet::all(g.node_count()), NodeSet{origin});
  BoundaryData data;
  data.finite_values = {{origin, 1.0}};
  data.value_at_infinity = 0.0;
  ExhaustionSchedule schedule;
  schedule.radii = {8, 16, 32, 64};
  const PerronBracket b = bracket_upper_lower(g, omega, data, schedule);
  CHECK(b.lower[origin + 4] > 0.95);
}

TEST_CASE("two-ball antisymmetric data: free-shell field tends to one half") {
  GridSpec spec;
  spec.dimension = 3;
  spec.spacing = 0.5;
  spec.lower = {-12, -12, -12};
  spec.upper = {12, 12, 12};
  const WeightedGraph g = build_grid(spec);
  const auto in_ball = [](auto x, double cx) { return std::hypot(x[0] - cx, x[1], x[2]) <= 1.0 + 1e-12; };
  const NodeSet left = select_nodes(g, [&](auto x) { return in_ball(x, -2.0); });
  const NodeSet right = select_nodes(g, [&](auto x) { return in_ball(x, 2.0); });
  const NodeSet omega = set_union(left, right).complement(g.node_count());
  BoundaryData data;
  data.finite_values = boundary_pins(g, omega, [&](NodeIndex i) { return left.contains(i) ? 1.0 : 0.0; });
  const ScalarField u = hf_solution(g, omega, data);
  const auto at = [&](double x, double y, double z) {
    const NodeSet hit = select_nodes(g, [&](auto q) { return std::hypot(q[0] - x, q[1] - y, q[2] - z) < 1e-9; });
    REQUIRE(hit.size() == 1);
    return u[hit.indices().front()];
  };
  CHECK(at(0, 5, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(at(6, 6, 6) - 0.5) < 0.1);
  CHECK(std::abs(at(-6, -6, -6) - 0.5) < 0.1);
  CHECK(at(-6, 0, 0) > at(6, 0, 0));
}
