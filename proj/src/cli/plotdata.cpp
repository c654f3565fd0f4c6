#include "pgreen/cli/plotdata.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "pgreen/csv.hpp"
#include "pgreen/errors.hpp"

namespace pgreen::cli {

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RejectedInput("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw RejectedInput("write failed for " + path.string());
}

}  // namespace

void write_node_csv(const std::filesystem::path& path, const WeightedGraph& graph, const ScalarField& field) {
  auto out = open_for_writing(path);
  out << "index";
  for (int k = 0; k < graph.dimension(); ++k) out << ",x" << k;
  out << ",value\n";
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    out << i;
    if (graph.has_positions()) {
      for (double x : graph.position(i)) out << ',' << format_real(x);
    }
    out << ',' << format_real(field[i]) << '\n';
  }
  finish(out, path);
}

void write_stage_csv(const std::filesystem::path& path, std::span<const double> radii, std::span<const double> values,
                     const char* value_column) {
  auto out = open_for_writing(path);
  CsvWriter csv(out);
  csv.row("stage", "radius", value_column);
  for (std::size_t j = 0; j < values.size(); ++j) csv.row(j, j < radii.size() ? radii[j] : kInfinity, values[j]);
  finish(out, path);
}

void write_level_audit_csv(const std::filesystem::path& path, std::span<const LevelAudit> audit) {
  auto out = open_for_writing(path);
  CsvWriter csv(out);
  csv.row("b", "capacity", "ratio", "exact");
  for (const auto& a : audit) csv.row(a.b, a.capacity, a.ratio, a.exact ? 1 : 0);
  finish(out, path);
}

std::vector<std::pair<double, double>> radial_profile(const WeightedGraph& graph, const ScalarField& field,
                                                      const NodeSet& nodes, const ExhaustionSchedule& schedule) {
  // Distances agreeing to 1e-6 edge lengths share a bin.
  std::map<long long, std::pair<double, int>> bins;
  std::map<long long, double> bin_distance;
  const double h = graph.min_edge_length();
  for (NodeIndex i : nodes) {
    const double d = schedule.distance_from_base(graph, i);
    const auto key = static_cast<long long>(std::llround(d / h * 1e6));
    auto& [sum, count] = bins[key];
    sum += field[i];
    ++count;
    bin_distance.emplace(key, d);
  }
  std::vector<std::pair<double, double>> rows;
  for (const auto& [key, acc] : bins) rows.emplace_back(bin_distance[key], acc.first / acc.second);
  return rows;
}

void write_two_column_csv(const std::filesystem::path& path, const char* x_name, const char* y_name,
                          std::span<const std::pair<double, double>> rows) {
  auto out = open_for_writing(path);
  CsvWriter csv(out);
  csv.row(x_name, y_name);
  for (const auto& [x, y] : rows) csv.row(x, y);
  finish(out, path);
}

void Summary::add(const std::string& key, double value) { add(key, format_real(value)); }

std::string Summary::str() const {
  std::string s;
  for (const auto& [k, v] : lines_) s += k + "=" + v + "\n";
  return s;
}

void Summary::write(const std::filesystem::path& path) const {
  auto out = open_for_writing(path);
  out << str();
  finish(out, path);
}

}  // namespace pgreen::cli
