#pragma once

#include <map>
#include <vector>

#include "relnav/env/environment.hpp"
#include "relnav/numeric/tensor.hpp"

namespace relnav::agent {

struct TraversedEdge {
  int u = -1;
  int v = -1;
  double length = 0.0;
};

// The agent's incremental map of the environment: visited nodes, the
// current node, the frontier of seen-but-unvisited nodes, raw per-node
// embeddings accumulated from observations, and the ordered traversal
// history (an edge multiset with lengths).
//
// Known edges are those incident to a visited node; known-map paths only
// ever cross visited interiors.
class TopoMap {
 public:
  TopoMap(const env::EnvironmentGraph& g, int start);

  int current() const { return current_; }
  bool visited(int node) const;
  int visited_count() const;
  // Frontier nodes in ascending id order.
  const std::vector<int>& frontier() const { return frontier_; }
  const std::vector<TraversedEdge>& history() const { return history_; }
  const env::EnvironmentGraph& environment() const { return *env_; }

  // Folds the panorama observed at the current node into the map: marks the
  // node visited, promotes unseen neighbors to the frontier and refreshes
  // the per-node view accumulators. The observation must be of current().
  void apply_observation(const env::ViewpointObservation& obs);

  // Advances along a single known edge from current(), recording it in the
  // traversal history.
  void step_to(int adjacent_node);

  // Shortest path from `from` to `to` using known edges only; deterministic
  // with ties resolved toward lower node ids. Both endpoints must be known.
  std::vector<int> known_path(int from, int to) const;

  // Total length of the path edges that already appear in the traversal
  // history (multiset membership, each edge counted once per crossing).
  double reused_length(const std::vector<int>& path) const;

  // Raw d_view embedding for a node: the mean of view features observed
  // toward it so far (or its own panorama mean once visited). Zero until
  // the node has been seen.
  numeric::Tensor2 node_embedding_raw(int node) const;

 private:
  bool edge_known(int u, int v) const;
  double edge_length(int u, int v) const;

  const env::EnvironmentGraph* env_;
  int current_;
  std::vector<char> visited_;
  std::vector<int> frontier_;
  std::vector<TraversedEdge> history_;
  // Node -> (accumulated view feature sum, sample count).
  std::map<int, std::pair<std::vector<double>, int>> toward_views_;
  std::map<int, std::vector<double>> self_views_;
};

}  // namespace relnav::agent
