#include "pgreen/random_graphs.hpp"

#include <set>
#include <utility>

#include "pgreen/errors.hpp"

namespace pgreen {

WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t nodes, std::size_t extra_edges, double p) {
  if (nodes == 0) throw RejectedInput("graph needs at least one node");
  std::uniform_real_distribution<double> weight(0.5, 2.0), unit(0.0, 1.0);
  std::vector<double> measure(nodes), positions(2 * nodes);
  for (auto& m : measure) m = weight(rng);
  for (auto& x : positions) x = unit(rng);

  std::set<std::pair<NodeIndex, NodeIndex>> used;
  std::vector<Edge> edges;
  for (NodeIndex i = 1; i < nodes; ++i) {
    const NodeIndex j = std::uniform_int_distribution<NodeIndex>(0, i - 1)(rng);
    used.emplace(j, i);
    edges.push_back({j, i, weight(rng)});
  }
  const std::size_t max_edges = nodes * (nodes - 1) / 2;
  std::uniform_int_distribution<NodeIndex> pick(0, nodes - 1);
  while (edges.size() < std::min(max_edges, nodes - 1 + extra_edges)) {
    NodeIndex a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!used.emplace(a, b).second) continue;
    edges.push_back({a, b, weight(rng)});
  }
  return WeightedGraph(std::move(measure), std::move(edges), p, std::move(positions), 2);
}

NodeSet random_subset(std::mt19937_64& rng, const NodeSet& pool, double keep) {
  std::bernoulli_distribution coin(keep);
  std::vector<NodeIndex> out;
  for (NodeIndex i : pool) {
    if (coin(rng)) out.push_back(i);
  }
  return NodeSet(std::move(out));
}

}  // namespace pgreen
