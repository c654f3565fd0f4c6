#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pgreen/analytic_oracles.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/model_space.hpp"

using namespace pgreen;

TEST_CASE("radial condenser closed forms") {
  CHECK(radial_condenser_capacity(3, 2.0, 1.0, 2.0) == doctest::Approx(8 * M_PI).epsilon(1e-14));
  CHECK(radial_condenser_capacity(3, 2.0, 1.0, kInfinity) == doctest::Approx(4 * M_PI).epsilon(1e-14));
  CHECK(radial_condenser_capacity(2, 2.0, 1.0, kInfinity) == 0.0);
  CHECK(radial_condenser_capacity(2, 3.0, 1.0, kInfinity) == 0.0);
  // p = n: omega_{n-1} log(s/r)^{1-n}.
  CHECK(radial_condenser_capacity(2, 2.0, 1.0, std::exp(2.0)) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK_THROWS_AS(radial_condenser_capacity(3, 2.0, 2.0, 1.0), RejectedInput);
  CHECK_THROWS_AS(radial_condenser_capacity(3, 2.0, 1.0, 1.0), RejectedInput);
}

TEST_CASE("closed form matches independent Simpson quadrature") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> dim(2, 5);
  std::uniform_real_distribution<double> expo(1.2, 4.5), radius(0.2, 2.0), ratio(1.1, 5.0);
  for (int k = 0; k < 50; ++k) {
    const int n = dim(rng);
    const double p = expo(rng), r = radius(rng), s = r * ratio(rng);
    const double closed = radial_condenser_capacity(n, p, r, s);
    CHECK(closed == doctest::Approx(oracle::radial_capacity_simpson(n, p, r, s)).epsilon(1e-9));
    CHECK(closed == doctest::Approx(radial_condenser_capacity(n, p, r, s, {})).epsilon(1e-10));
  }
}

TEST_CASE("weighted radial quadrature") {
  // w(rho) = rho^2 in R^3 behaves like unweighted R^5 with omega_2 instead of omega_4.
  const double weighted = radial_condenser_capacity(3, 2.0, 1.0, 3.0, [](double rho) { return rho * rho; });
  const double scaled = radial_condenser_capacity(5, 2.0, 1.0, 3.0) * unit_sphere_area(3) / unit_sphere_area(5);
  CHECK(weighted == doctest::Approx(scaled).epsilon(1e-10));
}

TEST_CASE("degenerate limits") {
  double previous = 0.0;
  for (double gap : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double cap = radial_condenser_capacity(3, 2.5, 1.0 - gap, 1.0);
    CHECK(cap > previous);
    previous = cap;
  }
  previous = kInfinity;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double cap = radial_condenser_capacity(3, 2.5, r, 1.0);
    CHECK(cap < previous);
    previous = cap;
  }
  CHECK(previous < 1e-1);
}

TEST_CASE("R^n Green function") {
  CHECK(rn_green_constant(3, 2.0) == doctest::Approx(1 / (4 * M_PI)).epsilon(1e-14));
  CHECK(rn_green(3, 2.0, 2.0) == doctest::Approx(1 / (8 * M_PI)).epsilon(1e-14));
  CHECK_THROWS_AS(rn_green(3, 3.0, 1.0), RejectedInput);
  CHECK_THROWS_AS(rn_green(3, 2.0, 0.0), RejectedInput);
  for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.5}, {5, 1.5}}) {
    for (double b : {1e-3, 1e-2, 0.1, 1.0, 10.0, 1e2, 1e3}) {
      // {u >= b} is the ball of radius (b / C)^{(p-1)/(p-n)}.
      const double radius = std::pow(b / rn_green_constant(n, p), (p - 1) / (p - n));
      CHECK(radial_condenser_capacity(n, p, radius, kInfinity) * std::pow(b, p - 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted half-line") {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double r : {0.0, 1.0, 2.5}) {
      const HalfLineSolution s = oned_weighted([p](double t) { return std::exp((p - 1) * t); }, p, r);
      CHECK(s.alpha == doctest::Approx(std::exp(-r)).epsilon(1e-8));
      CHECK(s.energy == doctest::Approx(std::exp(r * (p - 1))).epsilon(1e-8));
      CHECK(s.potential(r) == 1.0);
      CHECK(s.potential(r + 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
      CHECK(s.potential(r + 60.0) < 1e-20);
    }
  }
  CHECK_THROWS_AS(oned_weighted([](double) { return 1.0; }, 2.0, 0.0), RejectedInput);
}

TEST_CASE("hyperbolicity of Lebesgue R^n") {
  for (int n : {2, 3, 4}) {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const HyperbolicityResult r = classify_hyperbolicity(lebesgue_growth(n), p);
      CHECK(r.analytic);
      CHECK(r.verdict == (p < n ? Hyperbolicity::hyperbolic : Hyperbolicity::parabolic));
    }
  }
  CHECK(classify_hyperbolicity(lebesgue_growth(3), 2.0).verdict == Hyperbolicity::hyperbolic);
  CHECK(classify_hyperbolicity(lebesgue_growth(2), 2.0).verdict == Hyperbolicity::parabolic);
  CHECK(classify_hyperbolicity(lebesgue_growth(3), 3.0).verdict == Hyperbolicity::parabolic);
}

TEST_CASE("critical power law is parabolic") {
  // (q - 1)/(p - 1) == 1.
  const HyperbolicityResult r = classify_hyperbolicity(PowerLawGrowth{2.0, 3.0}, 3.0);
  CHECK(r.analytic);
  CHECK(r.criterion == doctest::Approx(1.0));
  CHECK(r.verdict == Hyperbolicity::parabolic);
}

TEST_CASE("tabulated profiles") {
  SUBCASE("weighted line from node-measure sums is hyperbolic") {
    const double p = 2.0;
    GridSpec spec;
    spec.dimension = 1;
    spec.spacing = 1.0 / 16;
    spec.lower = {-16 * 40};
    spec.upper = {16 * 40};
    spec.weight = [p](auto x) { return std::exp((p - 1) * std::max(x[0], 0.0)); };
    spec.p = p;
    const WeightedGraph g = build_grid(spec);
    TabulatedGrowth t;
    for (double rho = 1.0; rho <= 32.0; rho += 1.0) {
      double mu = 0.0;
      for (NodeIndex i = 0; i < g.node_count(); ++i) {
        if (g.norm(i) < rho) mu += g.node_measure()[i];
      }
      t.rho.push_back(rho);
      t.mu.push_back(mu);
    }
    CHECK(classify_hyperbolicity(t, p).verdict == Hyperbolicity::hyperbolic);
  }
  SUBCASE("sampled power laws away from the threshold") {
    TabulatedGrowth t3, t2;
    for (double rho = 1.0; rho <= 1e3; rho *= 1.5) {
      t3.rho.push_back(rho);
      t3.mu.push_back(std::pow(rho, 3.0));
      t2.rho.push_back(rho);
      t2.mu.push_back(std::pow(rho, 2.0));
    }
    CHECK(classify_hyperbolicity(t3, 1.5).verdict == Hyperbolicity::hyperbolic);
    CHECK(classify_hyperbolicity(t2, 2.5).verdict == Hyperbolicity::parabolic);
    // Fitted criterion exactly at the threshold lands in the band.
    CHECK(classify_hyperbolicity(t3, 3.0).verdict == Hyperbolicity::inconclusive);
  }
  SUBCASE("non-monotone profile is rejected") {
    CHECK_THROWS_AS(classify_hyperbolicity(TabulatedGrowth{{1, 2, 3}, {1, 3, 2}}, 2.0), RejectedInput);
  }
}
