#pragma once

// Closed-form and quadrature ground truth: radial condenser capacities,
// the normalised Green function of R^n, the weighted half-line model, and
// the volume-growth hyperbolicity test.

#include <functional>
#include <variant>
#include <vector>

namespace pgreen {

/// Capacity of the spherical condenser (B_r, B_s) in unweighted R^n.
/// s may be infinite. For p >= n and s infinite the result is 0.
double radial_condenser_capacity(int n, double p, double r, double s);

/// Same condenser in R^n with radial density w, by quadrature of the
/// one-dimensional Euler-Lagrange reduction:
///   cap = ( int_r^s (omega_{n-1} rho^{n-1} w(rho))^{1/(1-p)} drho )^{1-p}.
double radial_condenser_capacity(int n, double p, double r, double s, const std::function<double(double)>& weight);

/// C_{n,p} such that u = C rho^{(p-n)/(p-1)} has cap({u >= b}, R^n) = b^{1-p}.
double rn_green_constant(int n, double p);
double rn_green(int n, double p, double rho);

/// Weighted line with density w on (r, inf).
struct HalfLineSolution {
  double alpha;         // int_r^inf w^{1/(1-p)} dt
  double energy;        // int_r^inf w |u_r'|^p dt by quadrature
  double tail_exponent; // local decay exponent of w^{1/(1-p)} at the end of the tail test
  std::function<double(double)> potential;  // u_r(x) = alpha^{-1} int_x^inf w^{1/(1-p)}
};

/// Throws RejectedInput when w^{1/(1-p)} is not integrable at infinity and
/// ConsistencyError when the energy identity energy = alpha^{1-p} fails
/// to 1e-8 relative.
HalfLineSolution oned_weighted(const std::function<double(double)>& weight, double p, double r);

struct PowerLawGrowth {
  double c;
  double q;
};

/// Samples (rho_k, mu(B(x0, rho_k))) with rho strictly increasing.
struct TabulatedGrowth {
  std::vector<double> rho;
  std::vector<double> mu;
};

using VolumeGrowthProfile = std::variant<PowerLawGrowth, TabulatedGrowth>;

/// mu(B(0, rho)) = omega_{n-1}/n rho^n.
PowerLawGrowth lebesgue_growth(int n);

enum class Hyperbolicity { hyperbolic, parabolic, inconclusive };
const char* to_string(Hyperbolicity h);

struct HyperbolicityResult {
  Hyperbolicity verdict;
  bool analytic;           // decided from an exact power law
  double growth_exponent;  // q, given or fitted over the last decade
  double criterion;        // (q-1)/(p-1); the integral converges iff > 1
  double integral;         // int_1^P (rho/mu)^{1/(p-1)} drho
  double upper_limit;      // P
};

/// Width of the band around criterion == 1 reported as inconclusive for
/// tabulated profiles.
inline constexpr double kHyperbolicityBand = 0.05;

HyperbolicityResult classify_hyperbolicity(const VolumeGrowthProfile& profile, double p);

}  // namespace pgreen
