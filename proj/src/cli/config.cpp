#include "pgreen/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pgreen/errors.hpp"

namespace pgreen::cli {

using nlohmann::json;

namespace {

constexpr double kGeometrySlack = 1e-12;

[[noreturn]] void reject(const std::string& key, const std::string& why) {
  throw RejectedInput("config: " + key + ": " + why);
}

// Numbers, or the strings "inf" / "-inf".
double read_real(const json& node, const std::string& key) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string()) {
    const auto s = node.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  reject(key, "expected a number");
}

json write_real(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return x;
}

std::vector<double> read_reals(const json& node, const std::string& key) {
  if (!node.is_array()) reject(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k) out.push_back(read_real(node[k], key + "[" + std::to_string(k) + "]"));
  return out;
}

json write_reals(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(write_real(x));
  return out;
}

const json& require(const json& node, const char* name, const std::string& where) {
  if (!node.is_object() || !node.contains(name)) reject(where + "." + name, "missing");
  return node.at(name);
}

template <typename T>
T read_or(const json& node, const char* name, T fallback, const std::string& where) {
  if (!node.contains(name)) return fallback;
  try {
    return node.at(name).get<T>();
  } catch (const json::exception&) {
    reject(where + "." + name, "wrong type");
  }
}

const char* kind_name(Predicate::Kind k) {
  switch (k) {
    case Predicate::Kind::all: return "all";
    case Predicate::Kind::indices: return "indices";
    case Predicate::Kind::ball: return "ball";
    case Predicate::Kind::half_space: return "half_space";
    case Predicate::Kind::annulus: return "annulus";
    case Predicate::Kind::union_of: return "union";
    case Predicate::Kind::intersection_of: return "intersection";
    case Predicate::Kind::complement_of: return "complement";
  }
  return "";
}

Predicate read_predicate(const json& node, const std::string& where) {
  if (!node.is_object()) reject(where, "predicate must be an object");
  const auto kind = read_or<std::string>(node, "kind", "", where);
  Predicate p;
  p.closed = read_or<bool>(node, "closed", true, where);
  if (kind == "all") {
    p.kind = Predicate::Kind::all;
  } else if (kind == "indices") {
    p.kind = Predicate::Kind::indices;
    p.indices = read_or<std::vector<NodeIndex>>(node, "nodes", {}, where);
  } else if (kind == "ball") {
    p.kind = Predicate::Kind::ball;
    p.center = read_reals(require(node, "center", where), where + ".center");
    p.radius = read_real(require(node, "radius", where), where + ".radius");
  } else if (kind == "half_space") {
    p.kind = Predicate::Kind::half_space;
    p.normal = read_reals(require(node, "normal", where), where + ".normal");
    p.offset = read_real(require(node, "offset", where), where + ".offset");
  } else if (kind == "annulus") {
    p.kind = Predicate::Kind::annulus;
    p.center = read_reals(require(node, "center", where), where + ".center");
    p.inner = read_real(require(node, "inner", where), where + ".inner");
    p.outer = read_real(require(node, "outer", where), where + ".outer");
  } else if (kind == "union" || kind == "intersection" || kind == "complement") {
    p.kind = kind == "union" ? Predicate::Kind::union_of
             : kind == "intersection" ? Predicate::Kind::intersection_of
                                      : Predicate::Kind::complement_of;
    const json& of = require(node, "of", where);
    if (!of.is_array() || of.empty()) reject(where + ".of", "expected a nonempty array");
    if (p.kind == Predicate::Kind::complement_of && of.size() != 1) reject(where + ".of", "complement takes one set");
    for (std::size_t k = 0; k < of.size(); ++k) {
      p.children.push_back(read_predicate(of[k], where + ".of[" + std::to_string(k) + "]"));
    }
  } else {
    reject(where + ".kind", "unknown predicate '" + kind + "'");
  }
  return p;
}

json write_predicate(const Predicate& p) {
  json out{{"kind", kind_name(p.kind)}, {"closed", p.closed}};
  switch (p.kind) {
    case Predicate::Kind::all:
      break;
    case Predicate::Kind::indices:
      out["nodes"] = p.indices;
      break;
    case Predicate::Kind::ball:
      out["center"] = write_reals(p.center);
      out["radius"] = write_real(p.radius);
      break;
    case Predicate::Kind::half_space:
      out["normal"] = write_reals(p.normal);
      out["offset"] = write_real(p.offset);
      break;
    case Predicate::Kind::annulus:
      out["center"] = write_reals(p.center);
      out["inner"] = write_real(p.inner);
      out["outer"] = write_real(p.outer);
      break;
    case Predicate::Kind::union_of:
    case Predicate::Kind::intersection_of:
    case Predicate::Kind::complement_of: {
      json of = json::array();
      for (const auto& c : p.children) of.push_back(write_predicate(c));
      out["of"] = of;
      break;
    }
  }
  return out;
}

bool within(double d, double r, bool closed) {
  const double slack = kGeometrySlack * std::max(1.0, std::abs(r));
  return closed ? d <= r + slack : d < r - slack;
}

double distance_to(std::span<const double> x, const std::vector<double>& c, const char* what) {
  if (c.size() != x.size()) throw RejectedInput(std::string("predicate ") + what + " has the wrong dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - c[k]) * (x[k] - c[k]);
  return std::sqrt(s);
}

Weight read_weight(const json& node, const std::string& where) {
  Weight w;
  const auto kind = read_or<std::string>(node, "kind", "constant", where);
  if (kind == "constant") {
    w.kind = Weight::Kind::constant;
    w.value = read_or<double>(node, "value", 1.0, where);
  } else if (kind == "exp") {
    w.kind = Weight::Kind::exp;
    w.rate = read_or<double>(node, "rate", 0.0, where);
  } else if (kind == "exp_half_line") {
    w.kind = Weight::Kind::exp_half_line;
    w.rate = read_or<double>(node, "rate", 0.0, where);
  } else if (kind == "radial_power") {
    w.kind = Weight::Kind::radial_power;
    w.power = read_or<double>(node, "power", 0.0, where);
  } else {
    reject(where + ".kind", "unknown weight '" + kind + "'");
  }
  return w;
}

json write_weight(const Weight& w) {
  switch (w.kind) {
    case Weight::Kind::constant: return {{"kind", "constant"}, {"value", w.value}};
    case Weight::Kind::exp: return {{"kind", "exp"}, {"rate", w.rate}};
    case Weight::Kind::exp_half_line: return {{"kind", "exp_half_line"}, {"rate", w.rate}};
    case Weight::Kind::radial_power: return {{"kind", "radial_power"}, {"power", w.power}};
  }
  return {};
}

// Weight as a function of the radius.
double weight_at_radius(const Weight& w, double rho) {
  switch (w.kind) {
    case Weight::Kind::constant: return w.value;
    case Weight::Kind::exp: return std::exp(w.rate * rho);
    case Weight::Kind::exp_half_line: return std::exp(w.rate * std::max(rho, 0.0));
    case Weight::Kind::radial_power: return std::pow(rho, w.power);
  }
  return 1.0;
}

double weight_at(const Weight& w, std::span<const double> x) {
  if (w.kind == Weight::Kind::exp_half_line) return std::exp(w.rate * std::max(x[0], 0.0));
  double s = 0.0;
  for (double c : x) s += c * c;
  return weight_at_radius(w, std::sqrt(s));
}

long to_index(double coordinate, double h, const std::string& key) {
  const double k = coordinate / h;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 * std::max(1.0, std::abs(k))) reject(key, "bound is not a multiple of the spacing");
  return static_cast<long>(rounded);
}

}  // namespace

NodeSet evaluate(const Predicate& predicate, const WeightedGraph& graph) {
  const std::size_t n = graph.node_count();
  switch (predicate.kind) {
    case Predicate::Kind::all:
      return NodeSet::all(n);
    case Predicate::Kind::indices: {
      NodeSet out{std::vector<NodeIndex>(predicate.indices)};
      out.validate(graph);
      return out;
    }
    case Predicate::Kind::ball:
    case Predicate::Kind::half_space:
    case Predicate::Kind::annulus:
      break;
    case Predicate::Kind::union_of: {
      NodeSet out;
      for (const auto& c : predicate.children) out = set_union(out, evaluate(c, graph));
      return out;
    }
    case Predicate::Kind::intersection_of: {
      NodeSet out = evaluate(predicate.children.front(), graph);
      for (std::size_t k = 1; k < predicate.children.size(); ++k) {
        out = set_intersection(out, evaluate(predicate.children[k], graph));
      }
      return out;
    }
    case Predicate::Kind::complement_of:
      return evaluate(predicate.children.front(), graph).complement(n);
  }
  if (!graph.has_positions()) throw RejectedInput("geometric predicates need node positions");
  return select_nodes(graph, [&](std::span<const double> x) {
    switch (predicate.kind) {
      case Predicate::Kind::ball:
        return within(distance_to(x, predicate.center, "center"), predicate.radius, predicate.closed);
      case Predicate::Kind::annulus: {
        const double d = distance_to(x, predicate.center, "center");
        return within(predicate.inner, d, predicate.closed) && within(d, predicate.outer, predicate.closed);
      }
      default: {
        if (predicate.normal.size() != x.size()) throw RejectedInput("half_space normal has the wrong dimension");
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += predicate.normal[k] * x[k];
        return within(predicate.offset, s, predicate.closed);
      }
    }
  });
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto solver_eq = [](const SolverConfig& x, const SolverConfig& y) {
    return x.epsilons == y.epsilons && x.gradient_tolerance == y.gradient_tolerance &&
           x.energy_rel_tolerance == y.energy_rel_tolerance && x.max_iterations == y.max_iterations &&
           x.record_trace == y.record_trace;
  };
  return a.space == b.space && a.p == b.p && a.problem == b.problem && a.schedule == b.schedule &&
         solver_eq(a.solver, b.solver) && a.perron == b.perron && a.output == b.output;
}

RunConfig parse_config(const json& tree) {
  if (!tree.is_object()) reject("<root>", "expected an object");
  RunConfig cfg;
  cfg.p = read_real(require(tree, "p", "<root>"), "p");
  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p)) reject("p", "must satisfy 1 < p < inf");

  const json& space = require(tree, "space", "<root>");
  const auto kind = read_or<std::string>(space, "kind", "", "space");
  if (kind == "grid") {
    cfg.space.kind = SpaceConfig::Kind::grid;
  } else if (kind == "radial") {
    cfg.space.kind = SpaceConfig::Kind::radial;
  } else if (kind == "line") {
    cfg.space.kind = SpaceConfig::Kind::line;
  } else {
    reject("space.kind", "expected one of grid, radial, line");
  }
  cfg.space.spacing = read_real(require(space, "spacing", "space"), "space.spacing");
  if (!(cfg.space.spacing > 0.0)) reject("space.spacing", "must be positive");
  if (space.contains("weight")) cfg.space.weight = read_weight(space.at("weight"), "space.weight");
  if (cfg.space.kind == SpaceConfig::Kind::radial) {
    cfg.space.dimension = read_or<int>(space, "dimension", 3, "space");
    cfg.space.r_min = read_real(require(space, "r_min", "space"), "space.r_min");
    cfg.space.r_max = read_real(require(space, "r_max", "space"), "space.r_max");
  } else {
    cfg.space.dimension = cfg.space.kind == SpaceConfig::Kind::line ? 1 : read_or<int>(space, "dimension", 1, "space");
    cfg.space.lower = read_reals(require(space, "lower", "space"), "space.lower");
    cfg.space.upper = read_reals(require(space, "upper", "space"), "space.upper");
    const auto dim = static_cast<std::size_t>(cfg.space.dimension);
    if (cfg.space.lower.size() != dim || cfg.space.upper.size() != dim) {
      reject("space.lower/upper", "need one bound per dimension");
    }
  }

  if (tree.contains("problem")) {
    const json& problem = tree.at("problem");
    if (problem.contains("E")) cfg.problem.e = read_predicate(problem.at("E"), "problem.E");
    if (problem.contains("Omega")) cfg.problem.omega = read_predicate(problem.at("Omega"), "problem.Omega");
    cfg.problem.e_unbounded = read_or<bool>(problem, "E_unbounded", false, "problem");
    if (problem.contains("x0")) cfg.problem.x0 = read_reals(problem.at("x0"), "problem.x0");
    if (problem.contains("levels")) {
      const json& levels = problem.at("levels");
      if (!levels.is_array()) reject("problem.levels", "expected an array of [a, b] pairs");
      for (std::size_t k = 0; k < levels.size(); ++k) {
        const auto pair = read_reals(levels[k], "problem.levels[" + std::to_string(k) + "]");
        if (pair.size() != 2) reject("problem.levels", "each level is a pair [a, b]");
        cfg.problem.levels.emplace_back(pair[0], pair[1]);
      }
    }
  }

  if (tree.contains("schedule")) {
    const json& s = tree.at("schedule");
    if (s.contains("base")) cfg.schedule.base = read_reals(s.at("base"), "schedule.base");
    if (s.contains("radii")) cfg.schedule.radii = read_reals(s.at("radii"), "schedule.radii");
    cfg.schedule.stop_tolerance = read_or<double>(s, "stop_tolerance", 1e-6, "schedule");
    cfg.schedule.max_stages = read_or<int>(s, "max_stages", 64, "schedule");
  }

  if (tree.contains("solver")) {
    const json& s = tree.at("solver");
    if (s.contains("epsilons")) cfg.solver.epsilons = read_reals(s.at("epsilons"), "solver.epsilons");
    cfg.solver.gradient_tolerance = read_or<double>(s, "gradient_tolerance", cfg.solver.gradient_tolerance, "solver");
    cfg.solver.energy_rel_tolerance =
        read_or<double>(s, "energy_rel_tolerance", cfg.solver.energy_rel_tolerance, "solver");
    cfg.solver.max_iterations = read_or<int>(s, "max_iterations", cfg.solver.max_iterations, "solver");
    cfg.solver.record_trace = read_or<bool>(s, "record_trace", false, "solver");
  }
  cfg.solver.validate();

  if (tree.contains("perron")) {
    const json& s = tree.at("perron");
    if (s.contains("rules")) {
      const json& rules = s.at("rules");
      if (!rules.is_array()) reject("perron.rules", "expected an array");
      for (std::size_t k = 0; k < rules.size(); ++k) {
        const std::string where = "perron.rules[" + std::to_string(k) + "]";
        cfg.perron.rules.push_back({read_predicate(require(rules[k], "region", where), where + ".region"),
                                    read_real(require(rules[k], "value", where), where + ".value")});
      }
    }
    if (s.contains("infinity") && !s.at("infinity").is_null()) {
      cfg.perron.infinity = read_real(s.at("infinity"), "perron.infinity");
    }
    const auto shell = read_or<std::string>(s, "shell", "pinned", "perron");
    if (shell != "pinned" && shell != "free") reject("perron.shell", "expected pinned or free");
    cfg.perron.shell = shell == "free" ? ShellMode::free : ShellMode::pinned;
    cfg.perron.bracket = read_or<bool>(s, "bracket", false, "perron");
    if (s.contains("probe")) {
      const json& probe = s.at("probe");
      if (probe.is_string() && probe.get<std::string>() == "infinity") {
        cfg.perron.probe_infinity = true;
      } else {
        cfg.perron.probe = read_reals(probe, "perron.probe");
      }
    }
  }

  if (tree.contains("output")) {
    const json& s = tree.at("output");
    cfg.output.directory = read_or<std::string>(s, "directory", "", "output");
    cfg.output.csv = read_or<bool>(s, "csv", true, "output");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RejectedInput("cannot open config file " + path);
  json tree;
  try {
    tree = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw RejectedInput("config " + path + ": " + e.what());
  }
  return parse_config(tree);
}

json to_json(const RunConfig& cfg) {
  json space{{"spacing", cfg.space.spacing}, {"weight", write_weight(cfg.space.weight)}};
  switch (cfg.space.kind) {
    case SpaceConfig::Kind::grid:
      space["kind"] = "grid";
      space["dimension"] = cfg.space.dimension;
      break;
    case SpaceConfig::Kind::line:
      space["kind"] = "line";
      break;
    case SpaceConfig::Kind::radial:
      space["kind"] = "radial";
      space["dimension"] = cfg.space.dimension;
      space["r_min"] = write_real(cfg.space.r_min);
      space["r_max"] = write_real(cfg.space.r_max);
      break;
  }
  if (cfg.space.kind != SpaceConfig::Kind::radial) {
    space["lower"] = write_reals(cfg.space.lower);
    space["upper"] = write_reals(cfg.space.upper);
  }

  json problem{{"E", write_predicate(cfg.problem.e)},
               {"Omega", write_predicate(cfg.problem.omega)},
               {"E_unbounded", cfg.problem.e_unbounded}};
  if (cfg.problem.x0) problem["x0"] = write_reals(*cfg.problem.x0);
  if (!cfg.problem.levels.empty()) {
    json levels = json::array();
    for (auto [a, b] : cfg.problem.levels) levels.push_back({write_real(a), write_real(b)});
    problem["levels"] = levels;
  }

  json schedule{{"radii", write_reals(cfg.schedule.radii)},
                {"stop_tolerance", cfg.schedule.stop_tolerance},
                {"max_stages", cfg.schedule.max_stages}};
  if (cfg.schedule.base) schedule["base"] = write_reals(*cfg.schedule.base);

  json solver{{"epsilons", write_reals(cfg.solver.epsilons)},
              {"gradient_tolerance", cfg.solver.gradient_tolerance},
              {"energy_rel_tolerance", cfg.solver.energy_rel_tolerance},
              {"max_iterations", cfg.solver.max_iterations},
              {"record_trace", cfg.solver.record_trace}};

  json rules = json::array();
  for (const auto& r : cfg.perron.rules) rules.push_back({{"region", write_predicate(r.region)}, {"value", write_real(r.value)}});
  json perron{{"rules", rules},
              {"infinity", cfg.perron.infinity ? write_real(*cfg.perron.infinity) : json(nullptr)},
              {"shell", to_string(cfg.perron.shell)},
              {"bracket", cfg.perron.bracket}};
  if (cfg.perron.probe_infinity) {
    perron["probe"] = "infinity";
  } else if (cfg.perron.probe) {
    perron["probe"] = write_reals(*cfg.perron.probe);
  }

  return json{{"space", space},
              {"p", cfg.p},
              {"problem", problem},
              {"schedule", schedule},
              {"solver", solver},
              {"perron", perron},
              {"output", {{"directory", cfg.output.directory}, {"csv", cfg.output.csv}}}};
}

WeightedGraph build_space(const RunConfig& cfg) {
  const SpaceConfig& s = cfg.space;
  const Weight w = s.weight;
  if (s.kind == SpaceConfig::Kind::radial) {
    RadialSpace radial{s.dimension, [w](double rho) { return weight_at_radius(w, rho); }, cfg.p};
    return build_radial_line(radial, s.r_min, s.r_max, s.spacing);
  }
  GridSpec grid;
  grid.dimension = s.dimension;
  grid.spacing = s.spacing;
  grid.p = cfg.p;
  for (int k = 0; k < s.dimension; ++k) {
    grid.lower.push_back(to_index(s.lower[k], s.spacing, "space.lower"));
    grid.upper.push_back(to_index(s.upper[k], s.spacing, "space.upper"));
  }
  if (!(w.kind == Weight::Kind::constant && w.value == 1.0)) {
    grid.weight = [w](std::span<const double> x) { return weight_at(w, x); };
  }
  return build_grid(grid);
}

NodeIndex nearest_node(const WeightedGraph& graph, const std::vector<double>& coordinates) {
  if (!graph.has_positions() || coordinates.size() != static_cast<std::size_t>(graph.dimension())) {
    throw RejectedInput("coordinates do not match the space dimension");
  }
  NodeIndex best = 0;
  double best_d = kInfinity;
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    const double d = distance_to(graph.position(i), coordinates, "point");
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ExhaustionSchedule build_schedule(const RunConfig& cfg, const WeightedGraph& graph) {
  ExhaustionSchedule schedule;
  if (cfg.schedule.base) schedule.base_node = nearest_node(graph, *cfg.schedule.base);
  schedule.radii = cfg.schedule.radii;
  schedule.stop_tolerance = cfg.schedule.stop_tolerance;
  schedule.max_stages = cfg.schedule.max_stages;
  schedule.validate();
  return schedule;
}

}  // namespace pgreen::cli
