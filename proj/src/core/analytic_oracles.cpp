#include "pgreen/analytic_oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/model_space.hpp"

namespace pgreen {

namespace {

void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw RejectedInput("exponent p must satisfy 1 < p < inf");
}

void check_dimension(int n) {
  if (n < 2) throw RejectedInput("radial oracles need an integer dimension n >= 2");
}

double integrate_finite(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14, &error);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  return integrator.integrate(f, a, std::numeric_limits<double>::infinity(), 1e-13, &error);
}

}  // namespace

double radial_condenser_capacity(int n, double p, double r, double s) {
  check_dimension(n);
  check_exponent(p);
  if (!(r > 0.0) || !(s > r)) throw RejectedInput("radial condenser needs 0 < r < s");
  const double omega = unit_sphere_area(n);
  if (p == static_cast<double>(n)) {
    if (std::isinf(s)) return 0.0;
    return omega * std::pow(std::log(s / r), 1.0 - p);
  }
  const double gamma = (p - n) / (p - 1.0);
  if (std::isinf(s) && p > n) return 0.0;
  const double s_term = std::isinf(s) ? 0.0 : std::pow(s, gamma);
  const double coeff = std::pow(std::abs(n - p) / (p - 1.0), p - 1.0);
  return omega * coeff * std::pow(std::abs(std::pow(r, gamma) - s_term), 1.0 - p);
}

double radial_condenser_capacity(int n, double p, double r, double s, const std::function<double(double)>& weight) {
  check_dimension(n);
  check_exponent(p);
  if (!(r > 0.0) || !(s > r)) throw RejectedInput("radial condenser needs 0 < r < s");
  const double omega = unit_sphere_area(n);
  const auto integrand = [&](double rho) {
    const double w = weight ? weight(rho) : 1.0;
    return std::pow(omega * std::pow(rho, n - 1) * w, 1.0 / (1.0 - p));
  };
  const double integral = std::isinf(s) ? integrate_to_infinity(integrand, r) : integrate_finite(integrand, r, s);
  if (std::isinf(integral)) return 0.0;
  return std::pow(integral, 1.0 - p);
}

double rn_green_constant(int n, double p) {
  check_dimension(n);
  check_exponent(p);
  if (!(p < n)) throw RejectedInput("R^n Green function exists only for p < n");
  return (p - 1.0) / (n - p) * std::pow(unit_sphere_area(n), 1.0 / (1.0 - p));
}

double rn_green(int n, double p, double rho) {
  if (!(rho > 0.0)) throw RejectedInput("Green function is evaluated at positive distance");
  return rn_green_constant(n, p) * std::pow(rho, (p - n) / (p - 1.0));
}

HalfLineSolution oned_weighted(const std::function<double(double)>& weight, double p, double r) {
  check_exponent(p);
  if (!weight) throw RejectedInput("weight function missing");
  const double inv = 1.0 / (1.0 - p);
  auto dual = [weight, inv](double t) { return std::pow(weight(t), inv); };

  // Tail test: local log-log decay exponent of w^{1/(1-p)} along t = r + 2^k.
  double exponent = 0.0;
  bool vanished = false;
  double t_prev = r + 1.0, f_prev = dual(t_prev);
  for (int k = 1; k <= 40; ++k) {
    const double t = r + std::ldexp(1.0, k);
    const double f = dual(t);
    if (!(f > 0.0)) {
      vanished = true;
      exponent = std::numeric_limits<double>::infinity();
      break;
    }
    exponent = -(std::log(f) - std::log(f_prev)) / (std::log(t) - std::log(t_prev));
    t_prev = t;
    f_prev = f;
  }
  if (!vanished && !(exponent > 1.05)) {
    throw RejectedInput("w^{1/(1-p)} is not integrable at infinity (tail exponent " + format_real(exponent) +
                        " <= 1)");
  }

  const double alpha = integrate_to_infinity(dual, r);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw RejectedInput("tail integral is not finite and positive");
  const double energy = std::pow(alpha, -p) * integrate_to_infinity(
                                                 [&](double t) {
                                                   // w * dual^p tends to dual, which vanishes where w overflows
                                                   const double w = weight(t);
                                                   if (!std::isfinite(w)) return 0.0;
                                                   return w * std::pow(dual(t), p);
                                                 }, r);
  const double expected = std::pow(alpha, 1.0 - p);
  if (std::abs(energy - expected) > 1e-8 * expected) {
    throw ConsistencyError("half-line energy identity failed: " + format_real(energy) + " vs " +
                           format_real(expected));
  }
  auto potential = [dual, alpha, r](double x) {
    if (x <= r) return 1.0;
    return integrate_to_infinity(dual, x) / alpha;
  };
  return {alpha, energy, exponent, potential};
}

PowerLawGrowth lebesgue_growth(int n) {
  check_dimension(n);
  return {unit_sphere_area(n) / n, static_cast<double>(n)};
}

const char* to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::hyperbolic:
      return "hyperbolic";
    case Hyperbolicity::parabolic:
      return "parabolic";
    case Hyperbolicity::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

namespace {

HyperbolicityResult classify_power(const PowerLawGrowth& law, double p) {
  if (!(law.c > 0.0) || !std::isfinite(law.q)) throw RejectedInput("power-law profile needs c > 0");
  const double criterion = (law.q - 1.0) / (p - 1.0);
  const double upper = 1e6;
  const double a = (1.0 - law.q) / (p - 1.0);
  const double c = std::pow(law.c, -1.0 / (p - 1.0));
  const double integral =
      std::abs(a + 1.0) < 1e-14 ? c * std::log(upper) : c * (std::pow(upper, a + 1.0) - 1.0) / (a + 1.0);
  // The integrand is rho^{-criterion}: borderline criterion == 1 diverges
  // logarithmically.
  const Hyperbolicity verdict = criterion > 1.0 + 1e-12 ? Hyperbolicity::hyperbolic : Hyperbolicity::parabolic;
  return {verdict, true, law.q, criterion, integral, upper};
}

HyperbolicityResult classify_tabulated(const TabulatedGrowth& tab, double p) {
  const std::size_t n = tab.rho.size();
  if (n < 2 || tab.mu.size() != n) throw RejectedInput("tabulated profile needs at least two (rho, mu) samples");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(tab.rho[k] > 0.0) || !(tab.mu[k] > 0.0)) throw RejectedInput("profile samples must be positive");
    if (k > 0 && !(tab.rho[k] > tab.rho[k - 1])) throw RejectedInput("profile radii must increase");
    if (k > 0 && tab.mu[k] < tab.mu[k - 1]) throw RejectedInput("volume profile must be nondecreasing");
  }
  // Tail exponent: least squares of log mu against log rho over the last decade.
  const double cut = tab.rho.back() / 10.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (tab.rho[k] < cut) continue;
    const double x = std::log(tab.rho[k]), y = std::log(tab.mu[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw RejectedInput("tabulated profile needs two samples in its last decade");
  const double q = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double criterion = (q - 1.0) / (p - 1.0);

  double integral = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (tab.rho[k] <= 1.0) continue;
    const double a = std::max(tab.rho[k - 1], 1.0), b = tab.rho[k];
    const auto mu_at = [&](double rho) {
      const double t = (std::log(rho) - std::log(tab.rho[k - 1])) / (std::log(b) - std::log(tab.rho[k - 1]));
      return std::exp((1.0 - t) * std::log(tab.mu[k - 1]) + t * std::log(tab.mu[k]));
    };
    const auto f = [&](double rho) { return std::pow(rho / mu_at(rho), 1.0 / (p - 1.0)); };
    integral += 0.5 * (b - a) * (f(a) + f(b));
  }

  Hyperbolicity verdict = Hyperbolicity::inconclusive;
  if (criterion > 1.0 + kHyperbolicityBand) verdict = Hyperbolicity::hyperbolic;
  if (criterion < 1.0 - kHyperbolicityBand) verdict = Hyperbolicity::parabolic;
  return {verdict, false, q, criterion, integral, tab.rho.back()};
}

}  // namespace

HyperbolicityResult classify_hyperbolicity(const VolumeGrowthProfile& profile, double p) {
  check_exponent(p);
  if (const auto* law = std::get_if<PowerLawGrowth>(&profile)) return classify_power(*law, p);
  return classify_tabulated(std::get<TabulatedGrowth>(profile), p);
}

}  // namespace pgreen
