#pragma once

// CSV artifacts. Dialect: comma separated, header row, LF endings, 17
// significant digits.

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pgreen/model_space.hpp"
#include "pgreen/penergy_solver.hpp"
#include "pgreen/potential_green.hpp"

namespace pgreen::cli {

/// index, x_0 .. x_{d-1}, value. Throws RejectedInput when unwritable.
void write_node_csv(const std::filesystem::path& path, const WeightedGraph& graph, const ScalarField& field);

/// stage, radius, value
void write_stage_csv(const std::filesystem::path& path, std::span<const double> radii, std::span<const double> values,
                     const char* value_column);

/// b, capacity, ratio, exact
void write_level_audit_csv(const std::filesystem::path& path, std::span<const LevelAudit> audit);

/// Mean field value per distinct distance from `base`, restricted to `nodes`.
std::vector<std::pair<double, double>> radial_profile(const WeightedGraph& graph, const ScalarField& field,
                                                      const NodeSet& nodes, const ExhaustionSchedule& schedule);

/// Two columns with the given header names.
void write_two_column_csv(const std::filesystem::path& path, const char* x_name, const char* y_name,
                          std::span<const std::pair<double, double>> rows);

/// key=value lines, in insertion order.
class Summary {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace pgreen::cli
