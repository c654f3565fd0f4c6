#include "pgreen/limits.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pgreen {

bool stopping_rule_met(std::span<const double> values, double tol) {
  if (values.size() < 3) return false;
  const std::size_t n = values.size();
  const auto small = [&](std::size_t j) {
    return std::abs(values[j] - values[j + 1]) < tol * std::max(std::abs(values[j + 1]), 1e-12);
  };
  return small(n - 3) && small(n - 2);
}

namespace {

struct LinearFit {
  double intercept;
  double slope;
  double ssr;
};

// Least squares of v ~ c + A * x over four points.
LinearFit fit_line(const std::array<double, 4>& x, const std::array<double, 4>& v) {
  double mx = 0.0, mv = 0.0;
  for (int k = 0; k < 4; ++k) {
    mx += x[k] / 4.0;
    mv += v[k] / 4.0;
  }
  double sxx = 0.0, sxv = 0.0;
  for (int k = 0; k < 4; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxv += (x[k] - mx) * (v[k] - mv);
  }
  const double slope = sxx > 0.0 ? sxv / sxx : 0.0;
  const double intercept = mv - slope * mx;
  double ssr = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double e = v[k] - intercept - slope * x[k];
    ssr += e * e;
  }
  return {intercept, slope, ssr};
}

}  // namespace

std::optional<TailFit> fit_power_tail(std::span<const double> radii, std::span<const double> values) {
  if (radii.size() < 4 || values.size() < 4 || radii.size() != values.size()) return std::nullopt;
  std::array<double, 4> r{}, v{};
  const std::size_t off = radii.size() - 4;
  for (int k = 0; k < 4; ++k) {
    r[k] = radii[off + k];
    v[k] = values[off + k];
    if (!std::isfinite(r[k]) || !(r[k] > 0.0) || !std::isfinite(v[k])) return std::nullopt;
  }
  const auto at = [&](double beta) {
    std::array<double, 4> x{};
    // Scale by the last radius so the regressor stays O(1).
    for (int k = 0; k < 4; ++k) x[k] = std::pow(r[k] / r[3], -beta);
    return fit_line(x, v);
  };

  // Coarse log-spaced scan of beta, then golden-section refinement.
  constexpr int kScan = 241;
  const double lo_log = std::log(1e-2), hi_log = std::log(20.0);
  double best_log = lo_log;
  double best_ssr = at(std::exp(lo_log)).ssr;
  for (int k = 1; k < kScan; ++k) {
    const double t = lo_log + (hi_log - lo_log) * k / (kScan - 1);
    const double s = at(std::exp(t)).ssr;
    if (s < best_ssr) {
      best_ssr = s;
      best_log = t;
    }
  }
  const double step = (hi_log - lo_log) / (kScan - 1);
  double a = best_log - step, b = best_log + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = at(std::exp(c)).ssr, fd = at(std::exp(d)).ssr;
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = at(std::exp(c)).ssr;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = at(std::exp(d)).ssr;
    }
  }
  double beta_log = 0.5 * (a + b);
  if (best_ssr < at(std::exp(beta_log)).ssr) beta_log = best_log;
  const double beta = std::exp(beta_log);
  const LinearFit fit = at(beta);
  return TailFit{fit.intercept, fit.slope * std::pow(r[3], beta), beta, std::sqrt(fit.ssr / 4.0)};
}

}  // namespace pgreen
