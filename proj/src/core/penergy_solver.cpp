#include "pgreen/penergy_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <ostream>

#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"

namespace pgreen {

ScalarField::ScalarField(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw RejectedInput("scalar field values must be finite");
  }
}

ScalarField ScalarField::indicator(std::size_t n, const NodeSet& set) {
  std::vector<double> v(n, 0.0);
  for (NodeIndex i : set) v[i] = 1.0;
  return ScalarField(std::move(v));
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

void SolverConfig::validate() const {
  if (epsilons.empty()) throw RejectedInput("epsilon schedule is empty");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) throw RejectedInput("smoothing epsilons must be positive");
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) throw RejectedInput("smoothing epsilons must decrease");
  }
  if (epsilons.back() > 1e-12) throw RejectedInput("final smoothing epsilon must be at most 1e-12");
  if (!(gradient_tolerance > 0.0) || !(energy_rel_tolerance > 0.0)) {
    throw RejectedInput("solver tolerances must be positive");
  }
  if (max_iterations < 1) throw RejectedInput("max_iterations must be positive");
}

EnergyProblem EnergyProblem::dirichlet(std::size_t n, std::span<const Pin> pins) {
  EnergyProblem prob;
  prob.fixed.assign(n, false);
  prob.values.assign(n, 0.0);
  double lo = kInfinity, hi = -kInfinity;
  for (const Pin& pin : pins) {
    if (pin.node >= n) throw RejectedInput("pinned node out of range");
    if (!std::isfinite(pin.value)) throw RejectedInput("pinned values must be finite");
    lo = std::min(lo, pin.value);
    hi = std::max(hi, pin.value);
  }
  const double guess = pins.empty() ? 0.0 : 0.5 * (lo + hi);
  std::fill(prob.values.begin(), prob.values.end(), guess);
  for (const Pin& pin : pins) {
    prob.fixed[pin.node] = true;
    prob.values[pin.node] = pin.value;
  }
  return prob;
}

namespace {

// phi(t) = (t^2 + eps^2)^(p/2); eps == 0 gives |t|^p.
struct Kernel {
  double p;
  double eps;

  bool quadratic() const { return p == 2.0; }

  double value(double t) const {
    if (quadratic()) return t * t;
    if (eps == 0.0) return std::pow(std::abs(t), p);
    return std::pow(t * t + eps * eps, 0.5 * p);
  }
  double d1(double t) const {
    if (quadratic()) return 2.0 * t;
    if (eps == 0.0) return t == 0.0 ? 0.0 : p * std::pow(std::abs(t), p - 1.0) * (t > 0 ? 1.0 : -1.0);
    return p * t * std::pow(t * t + eps * eps, 0.5 * p - 1.0);
  }
  double d2(double t) const {
    if (quadratic()) return 2.0;
    const double s = t * t + eps * eps;
    return p * std::pow(s, 0.5 * p - 2.0) * ((p - 1.0) * t * t + eps * eps);
  }
};

class Minimizer {
 public:
  Minimizer(const WeightedGraph& graph, const EnergyProblem& prob, const SolverConfig& config)
      : graph_(graph), prob_(prob), config_(config), n_(graph.node_count()) {
    if (prob.fixed.size() != n_ || prob.values.size() != n_) throw RejectedInput("problem size does not match graph");
    if (!prob.lower.empty() && prob.lower.size() != n_) throw RejectedInput("lower-bound size does not match graph");
    if (!prob.mass.empty() && prob.mass.size() != n_) throw RejectedInput("mass size does not match graph");
    for (NodeIndex i = 0; i < n_; ++i) {
      if (!prob.fixed[i]) free_.push_back(i);
    }
    lower_.assign(n_, -kInfinity);
    if (!prob.lower.empty()) {
      for (NodeIndex i : free_) lower_[i] = prob.lower[i];
    }
  }

  SolveResult run() {
    SolveResult result;
    u_ = prob_.values;
    for (NodeIndex i : free_) u_[i] = std::max(u_[i], lower_[i]);
    const double p = graph_.p();
    std::vector<double> schedule = config_.epsilons;
    if (p == 2.0) schedule = {0.0};

    double residual = 0.0;
    if (!free_.empty()) {
      for (std::size_t s = 0; s < schedule.size(); ++s) {
        const bool last = s + 1 == schedule.size();
        residual = run_stage(Kernel{p, schedule[s]}, static_cast<int>(s), last, result);
      }
    }
    result.field = ScalarField(u_);
    result.energy = p_energy(graph_, result.field);
    if (!prob_.mass.empty()) {
      for (NodeIndex i = 0; i < n_; ++i) result.mass_energy += prob_.mass[i] * std::pow(std::abs(u_[i]), p);
    }
    result.residual = residual;
    if (residual > config_.gradient_tolerance) {
      throw NonConvergence("p-energy minimisation stalled with scaled residual " + format_real(residual), u_,
                           residual);
    }
    return result;
  }

 private:
  double objective(const std::vector<double>& u, const Kernel& k) const {
    double f = 0.0;
    for (const Edge& e : graph_.edges()) f += e.conductance * k.value(u[e.a] - u[e.b]);
    if (!prob_.mass.empty()) {
      for (NodeIndex i = 0; i < n_; ++i) {
        if (prob_.mass[i] != 0.0) f += prob_.mass[i] * k.value(u[i]);
      }
    }
    return f;
  }

  // Gradient at every node plus the absolute flux scale D_i.
  void gradient(const Kernel& k, std::vector<double>& g, std::vector<double>& scale) const {
    g.assign(n_, 0.0);
    scale.assign(n_, 0.0);
    for (const Edge& e : graph_.edges()) {
      const double f = e.conductance * k.d1(u_[e.a] - u_[e.b]);
      g[e.a] += f;
      g[e.b] -= f;
      scale[e.a] += std::abs(f);
      scale[e.b] += std::abs(f);
    }
    if (!prob_.mass.empty()) {
      for (NodeIndex i = 0; i < n_; ++i) {
        if (prob_.mass[i] == 0.0) continue;
        const double f = prob_.mass[i] * k.d1(u_[i]);
        g[i] += f;
        scale[i] += std::abs(f);
      }
    }
  }

  bool at_bound(NodeIndex i) const { return u_[i] <= lower_[i] + 1e-14 * (1.0 + std::abs(lower_[i])); }

  double projected_residual(const std::vector<double>& g, const std::vector<double>& scale) const {
    double r = 0.0;
    for (NodeIndex i : free_) {
      const double gi = at_bound(i) ? std::min(g[i], 0.0) : g[i];
      r = std::max(r, std::abs(gi) / std::max(1.0, scale[i]));
    }
    return r;
  }

  double run_stage(const Kernel& k, int stage, bool last, SolveResult& result) {
    std::vector<double> g, scale;
    double f = objective(u_, k);
    gradient(k, g, scale);
    double residual = projected_residual(g, scale);

    std::vector<int> slot(n_, -1);
    std::vector<double> d(n_, 0.0), trial(n_);
    for (int it = 0; it < config_.max_iterations; ++it) {
      if (config_.record_trace) result.trace.push_back({stage, it, k.eps, f, residual});
      if (residual <= config_.gradient_tolerance) break;
      ++result.iterations;

      // Active set: at the bound with the gradient pushing outward.
      double width = 0.0;
      for (NodeIndex i : free_) width = std::max(width, std::abs(u_[i] - std::max(lower_[i], u_[i] - g[i])));
      const double delta = std::min(1e-8, width);
      std::vector<NodeIndex> inactive;
      std::fill(slot.begin(), slot.end(), -1);
      for (NodeIndex i : free_) {
        if (u_[i] <= lower_[i] + delta && g[i] > 0.0) continue;
        slot[i] = static_cast<int>(inactive.size());
        inactive.push_back(i);
      }
      std::fill(d.begin(), d.end(), 0.0);
      if (inactive.empty()) break;
      newton_direction(k, inactive, slot, g, d);

      double slope = 0.0;
      for (NodeIndex i : inactive) slope += g[i] * d[i];
      if (!(slope < 0.0)) {
        // Scaled steepest descent.
        for (NodeIndex i : inactive) d[i] = -g[i] / std::max(diag_[slot[i]], 1e-300);
      }

      double alpha = 1.0;
      double f_trial = f;
      bool accepted = false;
      const double slack = 1e-14 * std::abs(f);
      for (int ls = 0; ls < 60; ++ls) {
        trial = u_;
        double decrease = 0.0;
        for (NodeIndex i : inactive) {
          trial[i] = std::max(lower_[i], u_[i] + alpha * d[i]);
          decrease += g[i] * (trial[i] - u_[i]);
        }
        f_trial = objective(trial, k);
        if (f_trial <= f + 1e-4 * decrease + slack) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;

      std::swap(u_, trial);
      const double f_old = f;
      f = f_trial;
      gradient(k, g, scale);
      const double new_residual = projected_residual(g, scale);
      const bool stalled = std::abs(f_old - f) <= config_.energy_rel_tolerance * std::max(std::abs(f), 1e-300);
      residual = new_residual;
      if (!last && stalled) break;
      if (last && stalled && alpha < 1.0 && residual > config_.gradient_tolerance) break;
    }
    return residual;
  }

  void newton_direction(const Kernel& k, const std::vector<NodeIndex>& inactive, const std::vector<int>& slot,
                        const std::vector<double>& g, std::vector<double>& d) {
    const auto m = static_cast<Eigen::Index>(inactive.size());
    std::vector<Eigen::Triplet<double>> triplets;
    diag_.assign(inactive.size(), 0.0);
    for (const Edge& e : graph_.edges()) {
      const int sa = slot[e.a], sb = slot[e.b];
      if (sa < 0 && sb < 0) continue;
      const double h = e.conductance * k.d2(u_[e.a] - u_[e.b]);
      if (sa >= 0) diag_[sa] += h;
      if (sb >= 0) diag_[sb] += h;
      if (sa >= 0 && sb >= 0) {
        triplets.emplace_back(sa, sb, -h);
        triplets.emplace_back(sb, sa, -h);
      }
    }
    if (!prob_.mass.empty()) {
      for (NodeIndex i : inactive) diag_[slot[i]] += prob_.mass[i] * k.d2(u_[i]);
    }
    double max_diag = 0.0;
    for (double v : diag_) max_diag = std::max(max_diag, v);
    const double shift = 1e-14 * max_diag;
    for (Eigen::Index s = 0; s < m; ++s) triplets.emplace_back(s, s, diag_[s] + shift);

    Eigen::SparseMatrix<double> hessian(m, m);
    hessian.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::VectorXd rhs(m);
    for (Eigen::Index s = 0; s < m; ++s) rhs[s] = -g[inactive[s]];

    Eigen::VectorXd step;
    bool ok = false;
    if (m <= kDirectLimit) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(hessian);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(rhs);
        ok = ldlt.info() == Eigen::Success && step.allFinite();
      }
    } else {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                               Eigen::IncompleteCholesky<double>>
          cg;
      cg.setTolerance(1e-12);
      cg.setMaxIterations(4 * m);
      cg.compute(hessian);
      if (cg.info() == Eigen::Success) {
        step = cg.solve(rhs);
        ok = step.allFinite();
      }
    }
    if (!ok) {
      step.resize(m);
      for (Eigen::Index s = 0; s < m; ++s) step[s] = rhs[s] / std::max(diag_[s], 1e-300);
    }
    for (Eigen::Index s = 0; s < m; ++s) d[inactive[s]] = step[s];
  }

  static constexpr Eigen::Index kDirectLimit = 20000;

  const WeightedGraph& graph_;
  const EnergyProblem& prob_;
  const SolverConfig& config_;
  std::size_t n_;
  std::vector<NodeIndex> free_;
  std::vector<double> lower_;
  std::vector<double> u_;
  std::vector<double> diag_;
};

void check_size(const WeightedGraph& graph, const ScalarField& field) {
  if (field.size() != graph.node_count()) throw RejectedInput("field size does not match graph");
}

}  // namespace

double p_energy(const WeightedGraph& graph, const ScalarField& field) {
  check_size(graph, field);
  const Kernel k{graph.p(), 0.0};
  double e = 0.0;
  for (const Edge& edge : graph.edges()) e += edge.conductance * k.value(field[edge.a] - field[edge.b]);
  return e;
}

std::vector<double> p_laplacian(const WeightedGraph& graph, const ScalarField& field) {
  check_size(graph, field);
  const Kernel k{graph.p(), 0.0};
  std::vector<double> g(graph.node_count(), 0.0);
  for (const Edge& e : graph.edges()) {
    const double f = e.conductance * k.d1(field[e.a] - field[e.b]);
    g[e.a] += f;
    g[e.b] -= f;
  }
  return g;
}

double smoothed_energy(const WeightedGraph& graph, const ScalarField& field, double eps) {
  check_size(graph, field);
  const Kernel k{graph.p(), eps};
  double e = 0.0;
  for (const Edge& edge : graph.edges()) e += edge.conductance * k.value(field[edge.a] - field[edge.b]);
  return e;
}

std::vector<double> smoothed_gradient(const WeightedGraph& graph, const ScalarField& field, double eps) {
  check_size(graph, field);
  const Kernel k{graph.p(), eps};
  std::vector<double> g(graph.node_count(), 0.0);
  for (const Edge& e : graph.edges()) {
    const double f = e.conductance * k.d1(field[e.a] - field[e.b]);
    g[e.a] += f;
    g[e.b] -= f;
  }
  return g;
}

SolveResult minimize_energy(const WeightedGraph& graph, const EnergyProblem& problem, const SolverConfig& config) {
  config.validate();
  return Minimizer(graph, problem, config).run();
}

ScalarField solve_dirichlet(const WeightedGraph& graph, std::span<const Pin> fixed, const SolverConfig& config) {
  if (fixed.empty()) throw RejectedInput("Dirichlet problem needs at least one pinned node");
  return minimize_energy(graph, EnergyProblem::dirichlet(graph.node_count(), fixed), config).field;
}

ScalarField solve_obstacle(const WeightedGraph& graph, const ScalarField& obstacle, const NodeSet& zero_set,
                           const SolverConfig& config) {
  check_size(graph, obstacle);
  zero_set.validate(graph);
  if (zero_set.empty()) throw RejectedInput("obstacle problem needs a nonempty zero set");
  if (obstacle.max() > 1.0) throw RejectedInput("obstacle must not exceed 1");
  for (NodeIndex i : zero_set) {
    if (obstacle[i] > 0.0) throw RejectedInput("obstacle is positive on the zero set: infeasible");
  }
  const std::size_t n = graph.node_count();
  EnergyProblem prob;
  prob.fixed = zero_set.mask(n);
  prob.values.assign(n, 0.0);
  prob.lower = obstacle.values();
  for (NodeIndex i = 0; i < n; ++i) {
    if (!prob.fixed[i]) prob.values[i] = std::max(obstacle[i], 0.0);
  }
  return minimize_energy(graph, prob, config).field;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  CsvWriter csv(out);
  csv.row("stage", "iteration", "epsilon", "energy", "residual");
  for (const TraceRow& r : trace) csv.row(r.stage, r.iteration, r.epsilon, r.energy, r.residual);
}

}  // namespace pgreen
