#pragma once

#include <vector>

#include "relnav/env/environment.hpp"

namespace relnav::env {

struct PathResult {
  std::vector<int> nodes;
  double length = 0.0;
};

// Dijkstra over the full graph. a == b yields ([a], 0). Deterministic:
// equal-length alternatives resolve toward lower node ids.
PathResult shortest_path(const EnvironmentGraph& g, int a, int b);

double geodesic_distance(const EnvironmentGraph& g, int a, int b);

// Dense all-pairs geodesic table, built once per environment. Evaluation
// and supervision query distances every step, so the O(n^2) table pays for
// itself immediately at this scale.
class AllPairsGeodesics {
 public:
  explicit AllPairsGeodesics(const EnvironmentGraph& g);
  double at(int a, int b) const { return dist_[static_cast<std::size_t>(a * n_ + b)]; }
  int node_count() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> dist_;
};

}  // namespace relnav::env
