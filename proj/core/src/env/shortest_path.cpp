#include "relnav/env/shortest_path.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "relnav/common/error.hpp"

namespace relnav::env {

namespace {

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> parent;
};

DijkstraResult dijkstra(const EnvironmentGraph& g, int source) {
  const int n = g.node_count();
  DijkstraResult r;
  r.dist.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  r.parent.assign(static_cast<std::size_t>(n), -1);
  r.dist[static_cast<std::size_t>(source)] = 0.0;

  using Item = std::pair<double, int>;  // (distance, node): ties settle on node id
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (const auto& [v, len] : g.neighbors(u)) {
      const double nd = d + len;
      const std::size_t vi = static_cast<std::size_t>(v);
      if (nd < r.dist[vi] ||
          (nd == r.dist[vi] && r.parent[vi] != -1 && u < r.parent[vi])) {
        r.dist[vi] = nd;
        r.parent[vi] = u;
        heap.emplace(nd, v);
      }
    }
  }
  return r;
}

}  // namespace

PathResult shortest_path(const EnvironmentGraph& g, int a, int b) {
  if (!g.has_node(a) || !g.has_node(b)) {
    throw LookupError("shortest_path: node out of range");
  }
  if (a == b) return {{a}, 0.0};
  const DijkstraResult r = dijkstra(g, a);
  if (!std::isfinite(r.dist[static_cast<std::size_t>(b)])) {
    throw ContractError("shortest_path: nodes " + std::to_string(a) + " and " +
                        std::to_string(b) + " are not connected");
  }
  PathResult out;
  out.length = r.dist[static_cast<std::size_t>(b)];
  for (int v = b; v != -1; v = r.parent[static_cast<std::size_t>(v)]) out.nodes.push_back(v);
  std::reverse(out.nodes.begin(), out.nodes.end());
  return out;
}

double geodesic_distance(const EnvironmentGraph& g, int a, int b) {
  return shortest_path(g, a, b).length;
}

AllPairsGeodesics::AllPairsGeodesics(const EnvironmentGraph& g) : n_(g.node_count()) {
  dist_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
  for (int a = 0; a < n_; ++a) {
    const DijkstraResult r = dijkstra(g, a);
    for (int b = 0; b < n_; ++b) {
      dist_[static_cast<std::size_t>(a * n_ + b)] = r.dist[static_cast<std::size_t>(b)];
    }
  }
}

}  // namespace relnav::env
