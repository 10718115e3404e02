#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cheapbandits/graph.hpp"

namespace cheapbandits::testing {

inline Graph complete_graph(int n, double weight = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
  return Graph::from_edge_list(n, edges);
}

/// d disjoint cliques of size m (nodes numbered block by block).
inline Graph disjoint_cliques(int d, int m) {
  std::vector<int> blocks(d, m);
  return generate_sbm(blocks, 1.0, 0.0, 0);
}

inline Graph unit_edge() {
  const Edge e{0, 1, 1.0};
  return Graph::from_edge_list(2, std::span(&e, 1));
}

/// Random weighted graph with n in [lo, hi] nodes.
inline Graph random_graph(std::mt19937_64& rng, int lo, int hi, double p = 0.3) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  return generate_er(n, p, rng());
}

}  // namespace cheapbandits::testing
