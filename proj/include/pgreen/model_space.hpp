#pragma once

// Discrete model spaces: weighted graphs built from grids and radial
// reductions, node sets, and exhaustion schedules standing in for
// unbounded spaces.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace pgreen {

using NodeIndex = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
  NodeIndex a;
  NodeIndex b;
  double conductance;
};

/// Neighbour entry of the adjacency structure.
struct Incidence {
  NodeIndex neighbor;
  std::size_t edge;
};

/// Finite connected graph carrying node measures and p-dependent edge
/// conductances. Immutable after construction.
///
/// The discrete p-energy of a field u is sum_e c_e |u_a - u_b|^p; node
/// measures enter only Sobolev-type quantities. Positions are optional and
/// stored row-major with a fixed dimension.
class WeightedGraph {
 public:
  /// Validates: positive measures and conductances, no self-loops, no
  /// duplicate unordered pairs, connected, p > 1. Throws RejectedInput.
  WeightedGraph(std::vector<double> node_measure, std::vector<Edge> edges, double p,
                std::vector<double> positions = {}, int dimension = 0);

  std::size_t node_count() const { return measure_.size(); }
  double p() const { return p_; }
  std::span<const double> node_measure() const { return measure_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Incidence> neighbors(NodeIndex i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  bool has_positions() const { return dimension_ > 0; }
  int dimension() const { return dimension_; }
  std::span<const double> position(NodeIndex i) const {
    return {positions_.data() + i * static_cast<std::size_t>(dimension_),
            static_cast<std::size_t>(dimension_)};
  }
  double distance(NodeIndex i, NodeIndex j) const;
  /// Euclidean norm of the position (distance from the coordinate origin).
  double norm(NodeIndex i) const;
  /// Shortest edge length; requires positions.
  double min_edge_length() const;

 private:
  std::vector<double> measure_;
  std::vector<Edge> edges_;
  double p_;
  std::vector<double> positions_;
  int dimension_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
};

/// Sorted, duplicate-free list of node indices.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::vector<NodeIndex> nodes);
  NodeSet(std::initializer_list<NodeIndex> nodes) : NodeSet(std::vector<NodeIndex>(nodes)) {}

  static NodeSet all(std::size_t node_count);
  static NodeSet from_mask(const std::vector<bool>& mask);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  bool contains(NodeIndex i) const;
  bool is_subset_of(const NodeSet& other) const;
  const std::vector<NodeIndex>& indices() const { return nodes_; }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  std::vector<bool> mask(std::size_t node_count) const;
  /// Throws RejectedInput if any index is out of range.
  void validate(const WeightedGraph& graph) const;

  friend NodeSet set_union(const NodeSet& a, const NodeSet& b);
  friend NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
  friend NodeSet set_difference(const NodeSet& a, const NodeSet& b);
  NodeSet complement(std::size_t node_count) const;

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<NodeIndex> nodes_;
};

/// Nodes outside `set` with at least one neighbour inside it.
NodeSet outer_boundary(const WeightedGraph& graph, const NodeSet& set);
/// Nodes of `set` with at least one neighbour outside it.
NodeSet inner_boundary(const WeightedGraph& graph, const NodeSet& set);

using PositionFunction = std::function<double(std::span<const double>)>;

/// Axis-aligned grid on a weighted R^n: node k along an axis sits at k*h,
/// with k ranging over [lower[axis], upper[axis]] inclusive.
struct GridSpec {
  int dimension = 1;
  double spacing = 1.0;
  std::vector<long> lower;
  std::vector<long> upper;
  PositionFunction weight;  // density w in dmu = w dx; empty means w == 1
  double p = 2.0;
};

/// Nearest-neighbour grid graph. Conductance of an edge is the mean of the
/// endpoint weights times h^(n-p); node measure is w * h^n.
WeightedGraph build_grid(const GridSpec& spec);

/// Radially symmetric weighted R^n, reduced to a 1D line in the radius.
struct RadialSpace {
  int dimension = 3;
  std::function<double(double)> weight;  // w(rho); empty means w == 1
  double p = 2.0;
};

/// 1D graph on rho in [r_min, r_max] with spacing h whose energy is the
/// radial reduction of the n-dimensional one: line weight
/// omega_{n-1} rho^{n-1} w(rho). Positions are the radii, so distances from
/// the origin are radii.
WeightedGraph build_radial_line(const RadialSpace& space, double r_min, double r_max, double h);

/// Surface measure of the unit sphere in R^n.
double unit_sphere_area(int n);

/// Open ball of radius r about a node (strict inequality).
NodeSet ball_set(const WeightedGraph& graph, NodeIndex center, double r);

using PositionPredicate = std::function<bool(std::span<const double>)>;
NodeSet select_nodes(const WeightedGraph& graph, const PositionPredicate& predicate);

/// Exhaustion of an unbounded space by balls B(x0, r_j). Without a base node
/// the balls are centred at the coordinate origin.
struct ExhaustionSchedule {
  std::optional<NodeIndex> base_node;
  std::vector<double> radii{kInfinity};
  double stop_tolerance = 1e-6;
  int max_stages = 64;

  /// Throws RejectedInput unless radii are positive, strictly increasing,
  /// stop_tolerance > 0 and max_stages >= 1.
  void validate() const;
  std::size_t stage_count() const;
  double distance_from_base(const WeightedGraph& graph, NodeIndex i) const;
  NodeSet ball(const WeightedGraph& graph, double r) const;
};

/// Omega intersected with each schedule ball, in schedule order.
std::vector<NodeSet> exhaust(const WeightedGraph& graph, const NodeSet& omega,
                             const ExhaustionSchedule& schedule);

/// Ratio of node measure of B(x0,2r) to B(x0,r): a doubling diagnostic.
double doubling_ratio(const WeightedGraph& graph, NodeIndex center, double r);

}  // namespace pgreen
