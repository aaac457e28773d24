#include "relnav/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "relnav/common/error.hpp"
#include "relnav/numeric/rng.hpp"

namespace relnav::env {

using numeric::Rng;
using numeric::Tensor2;

namespace {

double distance(const NodePosition& a, const NodePosition& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool connected(int n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

// Heading bin in [0, n_views) for a direction in the xy-plane.
int heading_bin(double dx, double dy, int n_views) {
  double theta = std::atan2(dy, dx);
  constexpr double two_pi = 6.283185307179586476925286766559;
  if (theta < 0.0) theta += two_pi;
  int bin = static_cast<int>(theta / (two_pi / n_views));
  return std::min(bin, n_views - 1);
}

}  // namespace

const NodePosition& EnvironmentGraph::position(int id) const {
  if (!has_node(id)) throw LookupError("EnvironmentGraph: unknown node " + std::to_string(id));
  return positions_[static_cast<std::size_t>(id)];
}

const std::vector<std::pair<int, double>>& EnvironmentGraph::neighbors(int id) const {
  if (!has_node(id)) throw LookupError("EnvironmentGraph: unknown node " + std::to_string(id));
  return adjacency_[static_cast<std::size_t>(id)];
}

const std::vector<ObjectPlacement>& EnvironmentGraph::objects_at(int id) const {
  if (!has_node(id)) throw LookupError("EnvironmentGraph: unknown node " + std::to_string(id));
  return objects_[static_cast<std::size_t>(id)];
}

std::size_t EnvironmentGraph::object_count() const {
  std::size_t n = 0;
  for (const auto& v : objects_) n += v.size();
  return n;
}

void EnvironmentGraph::rebuild_adjacency() {
  adjacency_.assign(positions_.size(), {});
  for (const Edge& e : edges_) {
    adjacency_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.length);
    adjacency_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.length);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

void EnvironmentGraph::validate() const {
  for (const Edge& e : edges_) {
    if (!has_node(e.u) || !has_node(e.v)) throw IoError("environment: edge endpoint out of range");
    if (e.u == e.v) throw IoError("environment: self-loop on node " + std::to_string(e.u));
    const double d = distance(positions_[static_cast<std::size_t>(e.u)],
                              positions_[static_cast<std::size_t>(e.v)]);
    if (std::fabs(d - e.length) > 1e-9) {
      throw IoError("environment: edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                    " length " + std::to_string(e.length) +
                    " does not match endpoint distance " + std::to_string(d));
    }
    if (e.length <= 0.0) throw IoError("environment: non-positive edge length");
  }
  if (!connected(node_count(), edges_)) throw IoError("environment: graph is not connected");
  for (const auto& per_node : objects_) {
    for (const ObjectPlacement& o : per_node) {
      const double norm = std::sqrt(o.direction[0] * o.direction[0] +
                                    o.direction[1] * o.direction[1] +
                                    o.direction[2] * o.direction[2]);
      if (std::fabs(norm - 1.0) > 1e-9) throw IoError("environment: non-unit object direction");
      if (o.depth < 0.0) throw IoError("environment: negative object depth");
      if (o.category < 0 || o.category >= config_.vocab_size) {
        throw IoError("environment: object category out of vocabulary range");
      }
    }
  }
}

EnvironmentGraph generate_environment(std::uint64_t seed, const EnvConfig& config) {
  if (config.node_count < 2) throw ContractError("generate_environment: node_count must be >= 2");
  if (config.degree < 1) throw ContractError("generate_environment: degree must be >= 1");
  if (config.vocab_size < 1) throw ContractError("generate_environment: vocab_size must be >= 1");
  if (config.objects_per_node < 0) {
    throw ContractError("generate_environment: objects_per_node must be >= 0");
  }
  if (config.obs.d_view < config.obs.d_obj + 2) {
    throw ContractError("generate_environment: d_view must be at least d_obj + 2");
  }

  const int n = config.node_count;
  const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double spacing =
      config.world_size > 0.0 ? config.world_size / grid_cols : 2.5;
  const double jitter = 0.3 * spacing;
  const int knn = std::min(config.degree, n - 1);

  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = Rng(seed).fork("layout").fork(static_cast<std::uint64_t>(attempt));

    std::vector<NodePosition> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int row = i / grid_cols, col = i % grid_cols;
      pos[static_cast<std::size_t>(i)] = {
          (col + 0.5) * spacing + rng.uniform(-jitter, jitter),
          (row + 0.5) * spacing + rng.uniform(-jitter, jitter), 0.0};
    }

    // Symmetrized k-nearest-neighbor edges, deduplicated.
    std::set<std::pair<int, int>> edge_keys;
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<double, int>> order;
      order.reserve(static_cast<std::size_t>(n) - 1);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        order.emplace_back(
            distance(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]), j);
      }
      std::sort(order.begin(), order.end());
      for (int k = 0; k < knn; ++k) {
        const int j = order[static_cast<std::size_t>(k)].second;
        edge_keys.emplace(std::min(i, j), std::max(i, j));
      }
    }
    std::vector<Edge> edges;
    edges.reserve(edge_keys.size());
    for (const auto& [u, v] : edge_keys) {
      edges.push_back(
          {u, v, distance(pos[static_cast<std::size_t>(u)], pos[static_cast<std::size_t>(v)])});
    }
    if (!connected(n, edges)) continue;

    EnvironmentGraph g;
    g.seed_ = seed;
    g.config_ = config;
    g.positions_ = std::move(pos);
    g.edges_ = std::move(edges);
    g.objects_.assign(static_cast<std::size_t>(n), {});
    Rng obj_rng = Rng(seed).fork("objects");
    for (int i = 0; i < n; ++i) {
      const int count =
          config.objects_per_node == 0
              ? 0
              : static_cast<int>(obj_rng.uniform_int(1, config.objects_per_node));
      for (int k = 0; k < count; ++k) {
        ObjectPlacement o;
        o.node = i;
        o.category = static_cast<int>(obj_rng.index(static_cast<std::size_t>(config.vocab_size)));
        const double theta = obj_rng.uniform(0.0, 6.283185307179586);
        const double pitch = obj_rng.uniform(-0.3, 0.3);
        o.direction = {std::cos(pitch) * std::cos(theta), std::cos(pitch) * std::sin(theta),
                       std::sin(pitch)};
        o.depth = obj_rng.uniform(0.5, 5.0);
        g.objects_[static_cast<std::size_t>(i)].push_back(o);
      }
    }
    g.rebuild_adjacency();
    g.validate();
    return g;
  }
  throw ContractError("generate_environment: no connected graph after " +
                      std::to_string(kMaxAttempts) + " attempts; increase degree");
}

std::vector<double> object_feature(const ObjectPlacement& obj, int vocab_size, int d_obj) {
  const int cat_dims = d_obj - 4;
  if (cat_dims < 1) throw ContractError("object_feature: d_obj must be at least 5");
  std::vector<double> f(static_cast<std::size_t>(d_obj), 0.0);
  // Fixed random projection of the one-hot category, seeded by the
  // vocabulary geometry only, so the same category looks the same in every
  // environment.
  Rng rng = Rng(0x6f626a65637470ull)
                .fork(static_cast<std::uint64_t>(vocab_size))
                .fork(static_cast<std::uint64_t>(d_obj))
                .fork(static_cast<std::uint64_t>(obj.category));
  const double scale = 1.0 / std::sqrt(static_cast<double>(cat_dims));
  for (int i = 0; i < cat_dims; ++i) f[static_cast<std::size_t>(i)] = scale * rng.normal();
  f[static_cast<std::size_t>(cat_dims)] = obj.direction[0];
  f[static_cast<std::size_t>(cat_dims) + 1] = obj.direction[1];
  f[static_cast<std::size_t>(cat_dims) + 2] = obj.direction[2];
  f[static_cast<std::size_t>(cat_dims) + 3] = obj.depth / 5.0;
  return f;
}

ViewpointObservation observe(const EnvironmentGraph& g, int node) {
  if (!g.has_node(node)) throw LookupError("observe: unknown node " + std::to_string(node));
  const ObservationConfig& oc = g.config().obs;
  const int vocab = g.config().vocab_size;

  ViewpointObservation obs;
  obs.node = node;
  obs.objects = g.objects_at(node);
  obs.object_features = Tensor2(obs.objects.size(), static_cast<std::size_t>(oc.d_obj));
  for (std::size_t i = 0; i < obs.objects.size(); ++i) {
    const auto f = object_feature(obs.objects[i], vocab, oc.d_obj);
    for (int j = 0; j < oc.d_obj; ++j) {
      obs.object_features.at(i, static_cast<std::size_t>(j)) = f[static_cast<std::size_t>(j)];
    }
  }

  // View = direction encoding + heading-binned aggregate of objects at this
  // node and (attenuated) at adjacent nodes, plus small seeded noise.
  obs.views = Tensor2(static_cast<std::size_t>(oc.n_views), static_cast<std::size_t>(oc.d_view));
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(oc.n_views),
                                       std::vector<double>(static_cast<std::size_t>(oc.d_obj)));
  std::vector<double> weight(static_cast<std::size_t>(oc.n_views), 0.0);
  for (const ObjectPlacement& o : obs.objects) {
    const int bin = heading_bin(o.direction[0], o.direction[1], oc.n_views);
    const auto f = object_feature(o, vocab, oc.d_obj);
    for (int j = 0; j < oc.d_obj; ++j) {
      acc[static_cast<std::size_t>(bin)][static_cast<std::size_t>(j)] +=
          f[static_cast<std::size_t>(j)];
    }
    weight[static_cast<std::size_t>(bin)] += 1.0;
  }
  const NodePosition& here = g.position(node);
  for (const auto& [nb, len] : g.neighbors(node)) {
    const NodePosition& there = g.position(nb);
    const int bin = heading_bin(there.x - here.x, there.y - here.y, oc.n_views);
    const auto& nb_objects = g.objects_at(nb);
    if (nb_objects.empty()) continue;
    std::vector<double> mean(static_cast<std::size_t>(oc.d_obj), 0.0);
    for (const ObjectPlacement& o : nb_objects) {
      const auto f = object_feature(o, vocab, oc.d_obj);
      for (int j = 0; j < oc.d_obj; ++j) {
        mean[static_cast<std::size_t>(j)] += f[static_cast<std::size_t>(j)];
      }
    }
    for (double& v : mean) v /= static_cast<double>(nb_objects.size());
    // Objects one hop away are visible but weaker.
    for (int j = 0; j < oc.d_obj; ++j) {
      acc[static_cast<std::size_t>(bin)][static_cast<std::size_t>(j)] +=
          0.5 * mean[static_cast<std::size_t>(j)];
    }
    weight[static_cast<std::size_t>(bin)] += 0.5;
  }

  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < oc.n_views; ++i) {
    const double theta = two_pi * (i + 0.5) / oc.n_views;
    Rng noise = Rng(g.seed())
                    .fork("view-noise")
                    .fork(static_cast<std::uint64_t>(node))
                    .fork(static_cast<std::uint64_t>(i));
    obs.views.at(static_cast<std::size_t>(i), 0) = std::cos(theta);
    obs.views.at(static_cast<std::size_t>(i), 1) = std::sin(theta);
    if (weight[static_cast<std::size_t>(i)] > 0.0) {
      for (int j = 0; j < oc.d_obj; ++j) {
        obs.views.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j + 2)) =
            acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
            weight[static_cast<std::size_t>(i)];
      }
    }
    for (int j = 0; j < oc.d_view; ++j) {
      obs.views.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
          0.02 * noise.normal();
    }
  }
  return obs;
}

std::string EnvironmentGraph::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = seed_;
  j["config"] = {{"node_count", config_.node_count},
                 {"degree", config_.degree},
                 {"vocab_size", config_.vocab_size},
                 {"objects_per_node", config_.objects_per_node},
                 {"world_size", config_.world_size},
                 {"n_views", config_.obs.n_views},
                 {"d_view", config_.obs.d_view},
                 {"d_obj", config_.obs.d_obj}};
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < node_count(); ++i) {
    const NodePosition& p = positions_[static_cast<std::size_t>(i)];
    nodes.push_back({{"id", i}, {"x", p.x}, {"y", p.y}, {"z", p.z}});
  }
  j["nodes"] = std::move(nodes);
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : edges_) {
    edges.push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}});
  }
  j["edges"] = std::move(edges);
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& per_node : objects_) {
    for (const ObjectPlacement& o : per_node) {
      objects.push_back({{"node", o.node},
                         {"category", o.category},
                         {"direction", o.direction},
                         {"depth", o.depth}});
    }
  }
  j["objects"] = std::move(objects);
  return j.dump(2);
}

EnvironmentGraph EnvironmentGraph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("environment: invalid JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw IoError("environment: unsupported or missing schema_version");
  }
  EnvironmentGraph g;
  g.seed_ = j.at("seed").get<std::uint64_t>();
  const auto& cj = j.at("config");
  g.config_.node_count = cj.at("node_count").get<int>();
  g.config_.degree = cj.at("degree").get<int>();
  g.config_.vocab_size = cj.at("vocab_size").get<int>();
  g.config_.objects_per_node = cj.at("objects_per_node").get<int>();
  g.config_.world_size = cj.at("world_size").get<double>();
  g.config_.obs.n_views = cj.at("n_views").get<int>();
  g.config_.obs.d_view = cj.at("d_view").get<int>();
  g.config_.obs.d_obj = cj.at("d_obj").get<int>();

  g.positions_.resize(j.at("nodes").size());
  for (const auto& nj : j.at("nodes")) {
    const int id = nj.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(g.positions_.size())) {
      throw IoError("environment: node id out of range");
    }
    g.positions_[static_cast<std::size_t>(id)] = {nj.at("x").get<double>(),
                                                  nj.at("y").get<double>(),
                                                  nj.at("z").get<double>()};
  }
  for (const auto& ej : j.at("edges")) {
    g.edges_.push_back({ej.at("u").get<int>(), ej.at("v").get<int>(),
                        ej.at("length").get<double>()});
  }
  g.objects_.assign(g.positions_.size(), {});
  for (const auto& oj : j.at("objects")) {
    ObjectPlacement o;
    o.node = oj.at("node").get<int>();
    o.category = oj.at("category").get<int>();
    const auto dir = oj.at("direction").get<std::vector<double>>();
    if (dir.size() != 3) throw IoError("environment: direction must have 3 components");
    o.direction = {dir[0], dir[1], dir[2]};
    o.depth = oj.at("depth").get<double>();
    if (o.node < 0 || o.node >= g.node_count()) throw IoError("environment: object node missing");
    g.objects_[static_cast<std::size_t>(o.node)].push_back(o);
  }
  g.rebuild_adjacency();
  g.validate();
  return g;
}

void EnvironmentGraph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("EnvironmentGraph::save: cannot open " + path);
  out << to_json() << "\n";
}

EnvironmentGraph EnvironmentGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("EnvironmentGraph::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace relnav::env
