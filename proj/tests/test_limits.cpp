#include <doctest.h>

#include <cmath>
#include <vector>

#include "pgreen/limits.hpp"

using namespace pgreen;

TEST_CASE("stopping rule needs two consecutive small increments") {
  CHECK_FALSE(stopping_rule_met(std::vector<double>{1.0, 1.0}, 1e-6));
  CHECK(stopping_rule_met(std::vector<double>{1.0, 1.0, 1.0}, 1e-6));
  CHECK_FALSE(stopping_rule_met(std::vector<double>{2.0, 1.0, 1.0}, 1e-6));
  CHECK(stopping_rule_met(std::vector<double>{5.0, 1.0 + 1e-8, 1.0 + 5e-9, 1.0}, 1e-6));
  // Zero limits use the 1e-12 floor.
  CHECK(stopping_rule_met(std::vector<double>{0.0, 0.0, 0.0}, 1e-6));
}

TEST_CASE("power tail fit recovers an exact power law") {
  for (double beta : {0.5, 1.0, 2.0, 3.5}) {
    const std::vector<double> r{4.0, 8.0, 16.0, 32.0};
    std::vector<double> v;
    for (double x : r) v.push_back(0.7 + 3.0 * std::pow(x, -beta));
    const auto fit = fit_power_tail(r, v);
    REQUIRE(fit);
    CHECK(fit->limit == doctest::Approx(0.7).epsilon(1e-7));
    CHECK(fit->exponent == doctest::Approx(beta).epsilon(1e-5));
    CHECK(fit->amplitude == doctest::Approx(3.0).epsilon(1e-5));
  }
}

TEST_CASE("power tail fit uses the last four points and rejects short input") {
  const std::vector<double> r{1.0, 2.0, 4.0, 8.0, 16.0};
  const std::vector<double> v{100.0, 2.5, 2.25, 2.125, 2.0625};
  const auto fit = fit_power_tail(r, v);
  REQUIRE(fit);
  CHECK(fit->limit == doctest::Approx(2.0).epsilon(1e-7));
  CHECK_FALSE(fit_power_tail(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
  CHECK_FALSE(fit_power_tail(std::vector<double>{1, 2, 3, INFINITY}, std::vector<double>{1, 2, 3, 4}));
}

TEST_CASE("constant sequences extrapolate to themselves") {
  const auto fit = fit_power_tail(std::vector<double>{1, 2, 4, 8}, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  REQUIRE(fit);
  CHECK(fit->limit == doctest::Approx(0.5));
}
