#include "pgreen/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "pgreen/errors.hpp"

namespace pgreen {

WeightedGraph::WeightedGraph(std::vector<double> node_measure, std::vector<Edge> edges, double p,
                             std::vector<double> positions, int dimension)
    : measure_(std::move(node_measure)),
      edges_(std::move(edges)),
      p_(p),
      positions_(std::move(positions)),
      dimension_(dimension) {
  if (!(p_ > 1.0) || !std::isfinite(p_)) throw RejectedInput("exponent p must satisfy 1 < p < inf");
  const std::size_t n = measure_.size();
  if (n == 0) throw RejectedInput("graph must have at least one node");
  for (double m : measure_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw RejectedInput("node measures must be positive");
  }
  if (dimension_ < 0) throw RejectedInput("negative dimension");
  if (dimension_ > 0 && positions_.size() != n * static_cast<std::size_t>(dimension_)) {
    throw RejectedInput("position array does not match node count and dimension");
  }
  if (dimension_ == 0 && !positions_.empty()) throw RejectedInput("positions given without a dimension");

  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    if (e.a >= n || e.b >= n) throw RejectedInput("edge endpoint out of range");
    if (e.a == e.b) throw RejectedInput("self-loop at node " + std::to_string(e.a));
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw RejectedInput("edge conductances must be positive");
    }
    if (!seen.emplace(std::min(e.a, e.b), std::max(e.a, e.b)).second) {
      throw RejectedInput("duplicate edge between " + std::to_string(e.a) + " and " + std::to_string(e.b));
    }
    ++degree[e.a];
    ++degree[e.b];
  }

  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    adjacency_[fill[edges_[k].a]++] = {edges_[k].b, k};
    adjacency_[fill[edges_[k].b]++] = {edges_[k].a, k};
  }

  std::vector<bool> visited(n, false);
  std::vector<NodeIndex> stack{0};
  visited[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeIndex i = stack.back();
    stack.pop_back();
    for (const Incidence& inc : neighbors(i)) {
      if (!visited[inc.neighbor]) {
        visited[inc.neighbor] = true;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  if (reached != n) throw RejectedInput("graph is not connected");
}

double WeightedGraph::distance(NodeIndex i, NodeIndex j) const {
  if (!has_positions()) throw RejectedInput("graph has no node positions");
  double s = 0.0;
  const auto a = position(i);
  const auto b = position(j);
  for (int k = 0; k < dimension_; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double WeightedGraph::norm(NodeIndex i) const {
  if (!has_positions()) throw RejectedInput("graph has no node positions");
  double s = 0.0;
  for (double x : position(i)) s += x * x;
  return std::sqrt(s);
}

double WeightedGraph::min_edge_length() const {
  double best = kInfinity;
  for (const Edge& e : edges_) best = std::min(best, distance(e.a, e.b));
  return best;
}

NodeSet::NodeSet(std::vector<NodeIndex> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

NodeSet NodeSet::all(std::size_t node_count) {
  NodeSet s;
  s.nodes_.resize(node_count);
  for (std::size_t i = 0; i < node_count; ++i) s.nodes_[i] = i;
  return s;
}

NodeSet NodeSet::from_mask(const std::vector<bool>& mask) {
  NodeSet s;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) s.nodes_.push_back(i);
  }
  return s;
}

bool NodeSet::contains(NodeIndex i) const { return std::binary_search(nodes_.begin(), nodes_.end(), i); }

bool NodeSet::is_subset_of(const NodeSet& other) const {
  return std::includes(other.nodes_.begin(), other.nodes_.end(), nodes_.begin(), nodes_.end());
}

std::vector<bool> NodeSet::mask(std::size_t node_count) const {
  std::vector<bool> m(node_count, false);
  for (NodeIndex i : nodes_) m[i] = true;
  return m;
}

void NodeSet::validate(const WeightedGraph& graph) const {
  if (!nodes_.empty() && nodes_.back() >= graph.node_count()) {
    throw RejectedInput("node index " + std::to_string(nodes_.back()) + " out of range");
  }
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_union(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                 std::back_inserter(out.nodes_));
  return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                        std::back_inserter(out.nodes_));
  return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.nodes_.begin(), a.nodes_.end(), b.nodes_.begin(), b.nodes_.end(),
                      std::back_inserter(out.nodes_));
  return out;
}

NodeSet NodeSet::complement(std::size_t node_count) const { return set_difference(all(node_count), *this); }

NodeSet outer_boundary(const WeightedGraph& graph, const NodeSet& set) {
  const auto inside = set.mask(graph.node_count());
  std::vector<bool> hit(graph.node_count(), false);
  for (NodeIndex i : set) {
    for (const Incidence& inc : graph.neighbors(i)) {
      if (!inside[inc.neighbor]) hit[inc.neighbor] = true;
    }
  }
  return NodeSet::from_mask(hit);
}

NodeSet inner_boundary(const WeightedGraph& graph, const NodeSet& set) {
  const auto inside = set.mask(graph.node_count());
  std::vector<NodeIndex> out;
  for (NodeIndex i : set) {
    for (const Incidence& inc : graph.neighbors(i)) {
      if (!inside[inc.neighbor]) {
        out.push_back(i);
        break;
      }
    }
  }
  return NodeSet(std::move(out));
}

WeightedGraph build_grid(const GridSpec& spec) {
  const int n = spec.dimension;
  if (n < 1) throw RejectedInput("grid dimension must be at least 1");
  if (!(spec.spacing > 0.0) || !std::isfinite(spec.spacing)) throw RejectedInput("grid spacing must be positive");
  if (spec.lower.size() != static_cast<std::size_t>(n) || spec.upper.size() != static_cast<std::size_t>(n)) {
    throw RejectedInput("grid extent must give one index range per axis");
  }
  std::vector<std::size_t> count(n);
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (spec.upper[k] < spec.lower[k]) throw RejectedInput("empty grid extent");
    count[k] = static_cast<std::size_t>(spec.upper[k] - spec.lower[k] + 1);
    total *= count[k];
  }

  const double h = spec.spacing;
  std::vector<double> positions(total * n);
  std::vector<double> weight(total);
  std::vector<double> measure(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t node = 0; node < total; ++node) {
    std::size_t rest = node;
    for (int k = 0; k < n; ++k) {
      idx[k] = rest % count[k];
      rest /= count[k];
      positions[node * n + k] = static_cast<double>(spec.lower[k] + static_cast<long>(idx[k])) * h;
    }
    const double w = spec.weight ? spec.weight(std::span<const double>(positions.data() + node * n, n)) : 1.0;
    if (!(w > 0.0) || !std::isfinite(w)) throw RejectedInput("grid weight must be positive on the extent");
    weight[node] = w;
    measure[node] = w * std::pow(h, n);
  }

  const double scale = std::pow(h, static_cast<double>(n) - spec.p);
  std::vector<Edge> edges;
  std::size_t stride = 1;
  for (int k = 0; k < n; ++k) {
    for (std::size_t node = 0; node < total; ++node) {
      if ((node / stride) % count[k] + 1 < count[k]) {
        const std::size_t other = node + stride;
        edges.push_back({node, other, 0.5 * (weight[node] + weight[other]) * scale});
      }
    }
    stride *= count[k];
  }
  return WeightedGraph(std::move(measure), std::move(edges), spec.p, std::move(positions), n);
}

double unit_sphere_area(int n) {
  if (n < 1) throw RejectedInput("dimension must be at least 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

WeightedGraph build_radial_line(const RadialSpace& space, double r_min, double r_max, double h) {
  if (space.dimension < 1) throw RejectedInput("radial dimension must be at least 1");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw RejectedInput("radial line needs 0 < r_min < r_max");
  if (!(h > 0.0)) throw RejectedInput("radial spacing must be positive");
  const auto steps = static_cast<std::size_t>(std::llround((r_max - r_min) / h));
  if (steps == 0) throw RejectedInput("radial line has no edges");
  const double omega = unit_sphere_area(space.dimension);
  std::vector<double> line_weight(steps + 1);
  std::vector<double> positions(steps + 1);
  std::vector<double> measure(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double rho = r_min + static_cast<double>(k) * h;
    const double w = space.weight ? space.weight(rho) : 1.0;
    if (!(w > 0.0) || !std::isfinite(w)) throw RejectedInput("radial weight must be positive");
    positions[k] = rho;
    line_weight[k] = omega * std::pow(rho, space.dimension - 1) * w;
    measure[k] = line_weight[k] * h;
  }
  const double scale = std::pow(h, 1.0 - space.p);
  std::vector<Edge> edges;
  edges.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    edges.push_back({k, k + 1, 0.5 * (line_weight[k] + line_weight[k + 1]) * scale});
  }
  return WeightedGraph(std::move(measure), std::move(edges), space.p, std::move(positions), 1);
}

NodeSet ball_set(const WeightedGraph& graph, NodeIndex center, double r) {
  if (!graph.has_positions()) throw RejectedInput("ball_set needs node positions");
  if (center >= graph.node_count()) throw RejectedInput("ball centre out of range");
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    if (graph.distance(i, center) < r) out.push_back(i);
  }
  return NodeSet(std::move(out));
}

NodeSet select_nodes(const WeightedGraph& graph, const PositionPredicate& predicate) {
  if (!graph.has_positions()) throw RejectedInput("geometric predicates need node positions");
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    if (predicate(graph.position(i))) out.push_back(i);
  }
  return NodeSet(std::move(out));
}

void ExhaustionSchedule::validate() const {
  if (radii.empty()) throw RejectedInput("schedule needs at least one radius");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw RejectedInput("schedule radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw RejectedInput("schedule radii must be strictly increasing");
  }
  if (!(stop_tolerance > 0.0)) throw RejectedInput("stop tolerance must be positive");
  if (max_stages < 1) throw RejectedInput("max_stages must be at least 1");
}

std::size_t ExhaustionSchedule::stage_count() const {
  return std::min(radii.size(), static_cast<std::size_t>(std::max(max_stages, 0)));
}

double ExhaustionSchedule::distance_from_base(const WeightedGraph& graph, NodeIndex i) const {
  return base_node ? graph.distance(i, *base_node) : graph.norm(i);
}

NodeSet ExhaustionSchedule::ball(const WeightedGraph& graph, double r) const {
  if (std::isinf(r)) return NodeSet::all(graph.node_count());
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    if (distance_from_base(graph, i) < r) out.push_back(i);
  }
  return NodeSet(std::move(out));
}

std::vector<NodeSet> exhaust(const WeightedGraph& graph, const NodeSet& omega, const ExhaustionSchedule& schedule) {
  schedule.validate();
  omega.validate(graph);
  std::vector<NodeSet> stages;
  for (std::size_t j = 0; j < schedule.stage_count(); ++j) {
    stages.push_back(set_intersection(omega, schedule.ball(graph, schedule.radii[j])));
  }
  return stages;
}

double doubling_ratio(const WeightedGraph& graph, NodeIndex center, double r) {
  const auto mass = [&](const NodeSet& s) {
    double m = 0.0;
    for (NodeIndex i : s) m += graph.node_measure()[i];
    return m;
  };
  return mass(ball_set(graph, center, 2.0 * r)) / mass(ball_set(graph, center, r));
}

}  // namespace pgreen
