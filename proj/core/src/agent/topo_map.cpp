#include "relnav/agent/topo_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "relnav/common/error.hpp"

namespace relnav::agent {

using numeric::Tensor2;

TopoMap::TopoMap(const env::EnvironmentGraph& g, int start) : env_(&g), current_(start) {
  if (!g.has_node(start)) throw ContractError("TopoMap: start node out of range");
  visited_.assign(static_cast<std::size_t>(g.node_count()), 0);
  visited_[static_cast<std::size_t>(start)] = 1;
}

bool TopoMap::visited(int node) const {
  return env_->has_node(node) && visited_[static_cast<std::size_t>(node)];
}

int TopoMap::visited_count() const {
  int n = 0;
  for (char v : visited_) n += v;
  return n;
}

void TopoMap::apply_observation(const env::ViewpointObservation& obs) {
  if (obs.node != current_) {
    throw ContractError("TopoMap::apply_observation: observation is for node " +
                        std::to_string(obs.node) + " but the agent is at " +
                        std::to_string(current_));
  }
  visited_[static_cast<std::size_t>(current_)] = 1;
  frontier_.erase(std::remove(frontier_.begin(), frontier_.end(), current_), frontier_.end());

  const int n_views = static_cast<int>(obs.views.rows());
  const int d_view = static_cast<int>(obs.views.cols());

  // Own panorama mean replaces any toward-view estimate for this node.
  std::vector<double> mean(static_cast<std::size_t>(d_view), 0.0);
  for (int i = 0; i < n_views; ++i) {
    for (int j = 0; j < d_view; ++j) {
      mean[static_cast<std::size_t>(j)] +=
          obs.views.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  for (double& v : mean) v /= static_cast<double>(n_views);
  self_views_[current_] = std::move(mean);

  const auto& here = env_->position(current_);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (const auto& [nb, len] : env_->neighbors(current_)) {
    if (!visited_[static_cast<std::size_t>(nb)]) {
      if (std::find(frontier_.begin(), frontier_.end(), nb) == frontier_.end()) {
        frontier_.push_back(nb);
      }
    }
    // Accumulate the view pointing at this neighbor.
    const auto& there = env_->position(nb);
    double theta = std::atan2(there.y - here.y, there.x - here.x);
    if (theta < 0.0) theta += two_pi;
    int bin = static_cast<int>(theta / (two_pi / n_views));
    bin = std::min(bin, n_views - 1);
    auto& [sum, count] = toward_views_[nb];
    if (sum.empty()) sum.assign(static_cast<std::size_t>(d_view), 0.0);
    for (int j = 0; j < d_view; ++j) {
      sum[static_cast<std::size_t>(j)] +=
          obs.views.at(static_cast<std::size_t>(bin), static_cast<std::size_t>(j));
    }
    ++count;
  }
  std::sort(frontier_.begin(), frontier_.end());
}

void TopoMap::step_to(int adjacent_node) {
  const double len = edge_length(current_, adjacent_node);
  history_.push_back({current_, adjacent_node, len});
  current_ = adjacent_node;
}

bool TopoMap::edge_known(int u, int v) const {
  (void)v;
  return visited_[static_cast<std::size_t>(u)] || visited_[static_cast<std::size_t>(v)];
}

double TopoMap::edge_length(int u, int v) const {
  for (const auto& [nb, len] : env_->neighbors(u)) {
    if (nb == v) return len;
  }
  throw ContractError("TopoMap: nodes " + std::to_string(u) + " and " + std::to_string(v) +
                      " are not adjacent");
}

std::vector<int> TopoMap::known_path(int from, int to) const {
  const int n = env_->node_count();
  auto known_node = [&](int v) {
    return visited_[static_cast<std::size_t>(v)] ||
           std::find(frontier_.begin(), frontier_.end(), v) != frontier_.end();
  };
  if (!known_node(from) || !known_node(to)) {
    throw ContractError("TopoMap::known_path: endpoint not on the known map");
  }
  if (from == to) return {from};

  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  dist[static_cast<std::size_t>(from)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, from);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    if (u == to) break;
    // Expansion only continues through visited nodes: an unvisited node has
    // no observed far side.
    if (u != from && !visited_[static_cast<std::size_t>(u)]) continue;
    for (const auto& [v, len] : env_->neighbors(u)) {
      if (!edge_known(u, v) || !known_node(v)) continue;
      const double nd = d + len;
      const std::size_t vi = static_cast<std::size_t>(v);
      if (nd < dist[vi] || (nd == dist[vi] && parent[vi] != -1 && u < parent[vi])) {
        dist[vi] = nd;
        parent[vi] = u;
        heap.emplace(nd, v);
      }
    }
  }
  if (!std::isfinite(dist[static_cast<std::size_t>(to)])) {
    throw ContractError("TopoMap::known_path: node " + std::to_string(to) +
                        " unreachable on the known map");
  }
  std::vector<int> path;
  for (int v = to; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

double TopoMap::reused_length(const std::vector<int>& path) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const int u = path[i], v = path[i + 1];
    for (const TraversedEdge& e : history_) {
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) {
        total += e.length;
        break;
      }
    }
  }
  return total;
}

Tensor2 TopoMap::node_embedding_raw(int node) const {
  const int d_view = env_->config().obs.d_view;
  Tensor2 out(1, static_cast<std::size_t>(d_view), 0.0);
  auto self = self_views_.find(node);
  if (self != self_views_.end()) {
    for (int j = 0; j < d_view; ++j) out.at(0, static_cast<std::size_t>(j)) =
        self->second[static_cast<std::size_t>(j)];
    return out;
  }
  auto toward = toward_views_.find(node);
  if (toward != toward_views_.end() && toward->second.second > 0) {
    const auto& [sum, count] = toward->second;
    for (int j = 0; j < d_view; ++j) {
      out.at(0, static_cast<std::size_t>(j)) =
          sum[static_cast<std::size_t>(j)] / static_cast<double>(count);
    }
  }
  return out;
}

}  // namespace relnav::agent
