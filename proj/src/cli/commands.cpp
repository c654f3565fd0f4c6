#include "pgreen/cli/commands.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pgreen/analytic_oracles.hpp"
#include "pgreen/capacity.hpp"
#include "pgreen/cli/config.hpp"
#include "pgreen/cli/plotdata.hpp"
#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"
#include "pgreen/perron.hpp"
#include "pgreen/potential_green.hpp"

namespace pgreen::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  std::string config_path;
  std::string output_dir;
  std::ostream* out;
};

fs::path resolve_output(const std::string& flag, const std::string& from_config) {
  std::string dir = flag;
  if (dir.empty()) dir = from_config;
  if (dir.empty()) {
    if (const char* env = std::getenv("PGREEN_OUTPUT_DIR"); env && *env) dir = env;
  }
  if (dir.empty()) dir = "pgreen-out";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw RejectedInput("cannot create output directory " + dir);
  return dir;
}

void finish(const Context& ctx, const Summary& summary, const fs::path& dir) {
  summary.write(dir / "summary.txt");
  *ctx.out << summary.str();
}

int cmd_capacity(const Context& ctx, bool naive) {
  const RunConfig cfg = load_config(ctx.config_path);
  const fs::path dir = resolve_output(ctx.output_dir, cfg.output.directory);
  const WeightedGraph graph = build_space(cfg);
  const ExhaustionSchedule schedule = build_schedule(cfg, graph);
  const CondenserProblem problem(graph, evaluate(cfg.problem.e, graph), evaluate(cfg.problem.omega, graph),
                                 cfg.problem.e_unbounded);
  const CapacityReport report = naive ? condenser_capacity_naive(problem, schedule, cfg.solver)
                                      : condenser_capacity(problem, schedule, cfg.solver);
  Summary s;
  s.add("command", naive ? "capacity-naive" : "capacity");
  s.add("nodes", graph.node_count());
  s.add("p", cfg.p);
  s.add("cap", report.value);
  s.add("infinite", report.infinite);
  s.add("converged", report.converged);
  s.add("stopping_reason", to_string(report.stopping_reason));
  s.add("stages", report.stage_values.size());
  if (report.extrapolated) s.add("cap_extrapolated", *report.extrapolated);
  if (cfg.output.csv) {
    write_stage_csv(dir / "stages.csv", report.stage_radii, report.stage_values, "capacity");
    if (report.potential.size() == graph.node_count()) write_node_csv(dir / "potential.csv", graph, report.potential);
  }
  finish(ctx, s, dir);
  return kExitOk;
}

int cmd_potential(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const fs::path dir = resolve_output(ctx.output_dir, cfg.output.directory);
  const WeightedGraph graph = build_space(cfg);
  const ExhaustionSchedule schedule = build_schedule(cfg, graph);
  const CondenserProblem problem(graph, evaluate(cfg.problem.e, graph), evaluate(cfg.problem.omega, graph),
                                 cfg.problem.e_unbounded);
  const Potential pot = capacitary_potential(problem, schedule, cfg.solver);
  Summary s;
  s.add("command", "potential");
  s.add("nodes", graph.node_count());
  s.add("p", cfg.p);
  s.add("cap", pot.capacity);
  s.add("energy", pot.energy);
  s.add("stages", pot.stage_radii.size());

  std::ostringstream levels;
  CsvWriter csv(levels);
  csv.row("a", "b", "level_capacity", "ratio", "truncation_residual", "exact_expected");
  for (std::size_t k = 0; k < cfg.problem.levels.size(); ++k) {
    const auto [a, b] = cfg.problem.levels[k];
    const LevelIdentityReport r = verify_level_identity(pot, a, b, cfg.solver);
    csv.row(a, b, r.level_capacity, r.ratio, r.truncation_residual, r.exact_expected ? 1 : 0);
    s.add(fmt::format("level{}_ratio", k), r.ratio);
  }
  if (cfg.output.csv) {
    write_node_csv(dir / "potential.csv", graph, pot.field);
    if (!cfg.problem.levels.empty()) {
      std::ofstream f(dir / "levels.csv", std::ios::binary);
      f << levels.str();
      if (!f) throw RejectedInput("cannot write levels.csv");
    }
  }
  finish(ctx, s, dir);
  return kExitOk;
}

int cmd_green(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const fs::path dir = resolve_output(ctx.output_dir, cfg.output.directory);
  if (!cfg.problem.x0) throw RejectedInput("config: problem.x0: missing");
  const WeightedGraph graph = build_space(cfg);
  ExhaustionSchedule schedule = build_schedule(cfg, graph);
  const NodeIndex x0 = nearest_node(graph, *cfg.problem.x0);
  const NodeSet omega = evaluate(cfg.problem.omega, graph);
  const SingularResult singular = singular_function(graph, omega, x0, schedule, cfg.solver);

  Summary s;
  s.add("command", "green");
  s.add("nodes", graph.node_count());
  s.add("p", cfg.p);
  s.add("x0", x0);
  s.add("stages", singular.stage_capacities.size());
  if (singular.extrapolated_capacity) s.add("point_cap_extrapolated", *singular.extrapolated_capacity);
  if (cfg.output.csv) write_stage_csv(dir / "stages.csv", singular.stage_radii, singular.stage_capacities, "point_capacity");
  if (!singular.singular) {
    s.add("singular", "none");
    s.add("reason", singular.reason);
    finish(ctx, s, dir);
    return kExitOk;
  }
  const GreenFunction green = green_normalize(*singular.singular, cfg.solver);
  s.add("singular", "found");
  s.add("u_x0", green.peak);
  s.add("alpha", green.alpha);
  s.add("slab_energy", green_energy_slab(green, 0.0, green.peak));
  s.add("audit_ratio_at_peak", green.audit.front().ratio);
  if (cfg.output.csv) {
    write_node_csv(dir / "green.csv", graph, green.field);
    write_level_audit_csv(dir / "audit.csv", green.audit);
    schedule.base_node = x0;
    const NodeSet off_peak = set_difference(green.omega, NodeSet{x0});
    const auto profile = radial_profile(graph, green.field, off_peak, schedule);
    write_two_column_csv(dir / "profile.csv", "distance", "mean_u", profile);
  }
  finish(ctx, s, dir);
  return kExitOk;
}

BoundaryData boundary_from_rules(const RunConfig& cfg, const WeightedGraph& graph, const NodeSet& omega) {
  std::vector<NodeSet> regions;
  for (const auto& rule : cfg.perron.rules) regions.push_back(evaluate(rule.region, graph));
  BoundaryData data;
  data.value_at_infinity = cfg.perron.infinity;
  data.shell = cfg.perron.shell;
  for (NodeIndex i : outer_boundary(graph, omega)) {
    std::size_t k = 0;
    while (k < regions.size() && !regions[k].contains(i)) ++k;
    if (k == regions.size()) throw RejectedInput("boundary node " + std::to_string(i) + " matches no perron rule");
    data.finite_values.push_back({i, cfg.perron.rules[k].value});
  }
  return data;
}

int cmd_perron(const Context& ctx) {
  const RunConfig cfg = load_config(ctx.config_path);
  const fs::path dir = resolve_output(ctx.output_dir, cfg.output.directory);
  const WeightedGraph graph = build_space(cfg);
  const ExhaustionSchedule schedule = build_schedule(cfg, graph);
  const NodeSet omega = evaluate(cfg.problem.omega, graph);
  const BoundaryData data = boundary_from_rules(cfg, graph, omega);

  Summary s;
  s.add("command", "perron");
  s.add("nodes", graph.node_count());
  s.add("p", cfg.p);
  s.add("shell", to_string(data.shell));
  ScalarField field;
  if (data.shell == ShellMode::free) {
    field = hf_solution(graph, omega, data, cfg.solver);
  } else {
    const PerronResult result = perron_solution(graph, omega, data, schedule, cfg.solver);
    s.add("stages", result.stage_fields.size());
    s.add("converged", result.converged);
    s.add("extrapolated", result.extrapolated);
    field = result.field;
    if (cfg.output.csv) write_node_csv(dir / "last_stage.csv", graph, result.last_stage);
  }
  s.add("field_min", field.min());
  s.add("field_max", field.max());
  if (cfg.output.csv) {
    write_node_csv(dir / "field.csv", graph, field);
    write_two_column_csv(dir / "profile.csv", "distance", "mean_u", radial_profile(graph, field, omega, schedule));
  }
  if (cfg.perron.bracket) {
    const PerronBracket bracket = bracket_upper_lower(graph, omega, data, schedule, cfg.solver);
    s.add("bracket_width", bracket.width);
    s.add("bracket_label", bracket.label);
    if (cfg.output.csv) {
      write_node_csv(dir / "bracket_lower.csv", graph, bracket.lower);
      write_node_csv(dir / "bracket_upper.csv", graph, bracket.upper);
    }
  }
  if (cfg.perron.probe_infinity || cfg.perron.probe) {
    ProbePoint point = AtInfinity{};
    if (cfg.perron.probe) point = nearest_node(graph, *cfg.perron.probe);
    const RegularityReport probe = regularity_probe(graph, omega, point, schedule, cfg.solver);
    s.add("probe_verdict", to_string(probe.verdict));
    s.add("probe_limit", probe.limit);
    if (cfg.output.csv) {
      std::vector<std::pair<double, double>> rows;
      for (const auto& row : probe.trace) rows.emplace_back(row.scale, row.value);
      write_two_column_csv(dir / "probe.csv", "scale", "value", rows);
    }
  }
  finish(ctx, s, dir);
  return kExitOk;
}

TabulatedGrowth read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RejectedInput("cannot open profile " + path);
  TabulatedGrowth tab;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw RejectedInput(fmt::format("{}:{}: expected rho,mu", path, lineno));
    char* end = nullptr;
    const double rho = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) {
      if (lineno == 1) continue;  // header
      throw RejectedInput(fmt::format("{}:{}: not a number", path, lineno));
    }
    const double mu = std::strtod(line.c_str() + comma + 1, &end);
    tab.rho.push_back(rho);
    tab.mu.push_back(mu);
  }
  return tab;
}

struct ClassifyArgs {
  std::string profile = "rn";
  int n = 3;
  double p = 2.0;
  double c = 1.0;
  double q = 3.0;
  std::string file;
};

int cmd_classify(const Context& ctx, const ClassifyArgs& args) {
  VolumeGrowthProfile profile;
  if (args.profile == "rn") {
    profile = lebesgue_growth(args.n);
  } else if (args.profile == "power") {
    profile = PowerLawGrowth{args.c, args.q};
  } else if (args.profile == "csv") {
    profile = read_profile_csv(args.file);
  } else {
    throw RejectedInput("unknown profile '" + args.profile + "' (rn, power, csv)");
  }
  const HyperbolicityResult r = classify_hyperbolicity(profile, args.p);
  Summary s;
  s.add("command", "classify");
  s.add("profile", args.profile);
  s.add("p", args.p);
  s.add("verdict", to_string(r.verdict));
  s.add("analytic", r.analytic);
  s.add("growth_exponent", r.growth_exponent);
  s.add("criterion", r.criterion);
  s.add("integral", r.integral);
  s.add("integral_upper_limit", r.upper_limit);
  finish(ctx, s, resolve_output(ctx.output_dir, ""));
  return kExitOk;
}

struct RingArgs {
  int n = 3;
  double p = 2.0;
  double c0 = 1.0;
  std::vector<double> targets{2.0, 2.0, 2.0, 2.0, 2.0};
};

int cmd_warnring(const Context& ctx, const RingArgs& args) {
  std::vector<double> c{args.c0};
  c.insert(c.end(), args.targets.begin(), args.targets.end());
  const WarningRing ring = build_warning_ring(c, args.n, args.p);
  const fs::path dir = resolve_output(ctx.output_dir, "");
  Summary s;
  s.add("command", "warnring");
  s.add("n", args.n);
  s.add("p", args.p);
  s.add("c0", ring.c0);
  s.add("s1", ring.s1);
  s.add("stages", ring.targets.size());
  std::ofstream f(dir / "rings.csv", std::ios::binary);
  CsvWriter csv(f);
  csv.row("j", "r", "s", "target", "capacity");
  double worst = 0.0;
  for (std::size_t j = 0; j < ring.targets.size(); ++j) {
    const double cap = ring.condenser_capacity(j);
    worst = std::max(worst, std::abs(cap - ring.targets[j]));
    csv.row(j + 1, ring.r[j], ring.s[j], ring.targets[j], cap);
  }
  if (!f) throw RejectedInput("cannot write rings.csv");
  s.add("max_target_error", worst);
  finish(ctx, s, dir);
  return kExitOk;
}

int cmd_selftest(const Context& ctx, unsigned long long seed, int samples) {
  const auto lines = run_selftest(seed, samples);
  bool ok = true;
  for (const auto& l : lines) {
    fmt::print(*ctx.out, "{} {}{}\n", l.passed ? "PASS" : "FAIL", l.name, l.detail.empty() ? "" : " (" + l.detail + ")");
    ok = ok && l.passed;
  }
  return ok ? kExitOk : kExitConsistency;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"p-energy capacities, potentials, Green functions and Perron solutions on weighted graphs", "pgreen"};
  app.require_subcommand(1, 1);
  Context ctx{{}, {}, &out};

  const auto with_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", ctx.config_path, "JSON run configuration")->required();
    sub->add_option("-o,--output", ctx.output_dir, "output directory");
  };
  auto* capacity = app.add_subcommand("capacity", "condenser capacity with exhaustion");
  bool naive = false;
  with_config(capacity);
  capacity->add_flag("--naive", naive, "capacity without the limit over E cap B_j");
  auto* potential = app.add_subcommand("potential", "capacitary potential and level identities");
  with_config(potential);
  auto* green = app.add_subcommand("green", "singular function and Green normalisation");
  with_config(green);
  auto* perron = app.add_subcommand("perron", "Dirichlet problem with a value at infinity");
  with_config(perron);

  ClassifyArgs classify_args;
  auto* classify = app.add_subcommand("classify", "p-hyperbolicity from volume growth");
  classify->add_option("--profile", classify_args.profile, "rn, power or csv")->capture_default_str();
  classify->add_option("--n", classify_args.n, "dimension for the rn profile")->capture_default_str();
  classify->add_option("--p", classify_args.p, "exponent")->capture_default_str();
  classify->add_option("--c", classify_args.c, "power profile coefficient")->capture_default_str();
  classify->add_option("--q", classify_args.q, "power profile exponent")->capture_default_str();
  classify->add_option("--file", classify_args.file, "two-column rho,mu CSV");
  classify->add_option("-o,--output", ctx.output_dir, "output directory");

  RingArgs ring_args;
  auto* warnring = app.add_subcommand("warnring", "nested annuli with prescribed condenser capacities");
  warnring->add_option("--n", ring_args.n)->capture_default_str();
  warnring->add_option("--p", ring_args.p)->capture_default_str();
  warnring->add_option("--c0", ring_args.c0)->capture_default_str();
  warnring->add_option("--targets", ring_args.targets, "c_1 c_2 ...")->capture_default_str();
  warnring->add_option("-o,--output", ctx.output_dir, "output directory");

  unsigned long long seed = 20240601;
  int samples = 40;
  auto* selftest = app.add_subcommand("selftest", "property suite on random small graphs");
  selftest->add_option("--seed", seed)->capture_default_str();
  selftest->add_option("--samples", samples)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*capacity) return cmd_capacity(ctx, naive);
    if (*potential) return cmd_potential(ctx);
    if (*green) return cmd_green(ctx);
    if (*perron) return cmd_perron(ctx);
    if (*classify) return cmd_classify(ctx, classify_args);
    if (*warnring) return cmd_warnring(ctx, ring_args);
    if (*selftest) return cmd_selftest(ctx, seed, samples);
  } catch (const RejectedInput& e) {
    err << "rejected: " << e.what() << "\n";
    return kExitRejected;
  } catch (const NonConvergence& e) {
    err << "solver did not converge: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNonConvergence;
  } catch (const ConsistencyError& e) {
    err << "internal consistency error: " << e.what() << "\n";
    return kExitConsistency;
  }
  return kExitUsage;
}

}  // namespace pgreen::cli
