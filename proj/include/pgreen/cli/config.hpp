#pragma once

// Run configuration: a JSON tree with sections space, p, problem, schedule,
// solver, perron and output. See README.md for the grammar.

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pgreen/model_space.hpp"
#include "pgreen/penergy_solver.hpp"
#include "pgreen/perron.hpp"

namespace pgreen::cli {

struct Predicate {
  enum class Kind { all, indices, ball, half_space, annulus, union_of, intersection_of, complement_of };
  Kind kind = Kind::all;
  std::vector<NodeIndex> indices;
  std::vector<double> center;  // ball, annulus
  double radius = 0.0;         // ball
  double inner = 0.0;          // annulus
  double outer = 0.0;          // annulus
  std::vector<double> normal;  // half_space: normal . x >= offset
  double offset = 0.0;
  bool closed = true;
  std::vector<Predicate> children;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

NodeSet evaluate(const Predicate& predicate, const WeightedGraph& graph);

struct Weight {
  enum class Kind { constant, exp, exp_half_line, radial_power };
  Kind kind = Kind::constant;
  double value = 1.0;  // constant
  double rate = 0.0;   // exp: e^{rate |x|}; exp_half_line: e^{rate max(x_0, 0)}
  double power = 0.0;  // radial_power: |x|^power

  friend bool operator==(const Weight&, const Weight&) = default;
};

struct SpaceConfig {
  enum class Kind { grid, radial, line };
  Kind kind = Kind::grid;
  int dimension = 1;
  double spacing = 1.0;
  std::vector<double> lower;  // grid and line, coordinates
  std::vector<double> upper;
  double r_min = 1.0;  // radial
  double r_max = 2.0;
  Weight weight;

  friend bool operator==(const SpaceConfig&, const SpaceConfig&) = default;
};

struct ProblemConfig {
  Predicate e;
  Predicate omega;
  bool e_unbounded = false;
  std::optional<std::vector<double>> x0;
  std::vector<std::pair<double, double>> levels;  // (a, b) pairs for the level identity

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct ScheduleConfig {
  std::optional<std::vector<double>> base;
  std::vector<double> radii{kInfinity};
  double stop_tolerance = 1e-6;
  int max_stages = 64;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct BoundaryRule {
  Predicate region;
  double value = 0.0;

  friend bool operator==(const BoundaryRule&, const BoundaryRule&) = default;
};

struct PerronConfig {
  std::vector<BoundaryRule> rules;  // first matching rule wins
  std::optional<double> infinity;
  ShellMode shell = ShellMode::pinned;
  bool bracket = false;
  std::optional<std::vector<double>> probe;  // node coordinates
  bool probe_infinity = false;

  friend bool operator==(const PerronConfig&, const PerronConfig&) = default;
};

struct OutputConfig {
  std::string directory;  // empty: PGREEN_OUTPUT_DIR, then ./pgreen-out
  bool csv = true;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  SpaceConfig space;
  double p = 2.0;
  ProblemConfig problem;
  ScheduleConfig schedule;
  SolverConfig solver;
  PerronConfig perron;
  OutputConfig output;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Throws RejectedInput with the offending key on malformed input.
RunConfig parse_config(const nlohmann::json& tree);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

WeightedGraph build_space(const RunConfig& config);
ExhaustionSchedule build_schedule(const RunConfig& config, const WeightedGraph& graph);

/// Node nearest to the given coordinates.
NodeIndex nearest_node(const WeightedGraph& graph, const std::vector<double>& coordinates);

}  // namespace pgreen::cli
