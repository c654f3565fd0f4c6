#pragma once

// Random connected weighted graphs for property checks.

#include <random>

#include "pgreen/model_space.hpp"

namespace pgreen {

/// Random spanning tree plus `extra_edges` distinct chords; conductances and
/// measures uniform in [0.5, 2]; positions uniform in [0, 1]^2.
WeightedGraph random_connected_graph(std::mt19937_64& rng, std::size_t nodes, std::size_t extra_edges, double p);

/// Uniformly random subset of `pool`, each node kept with probability `keep`.
NodeSet random_subset(std::mt19937_64& rng, const NodeSet& pool, double keep);

}  // namespace pgreen
