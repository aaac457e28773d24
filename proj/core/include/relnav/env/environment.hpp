#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relnav/numeric/tensor.hpp"

namespace relnav::env {

struct NodePosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Edge {
  int u = -1;
  int v = -1;
  double length = 0.0;
};

// An object visible from a node: category index into the shared vocabulary,
// unit direction from the node toward the object, and depth in meters.
struct ObjectPlacement {
  int node = -1;
  int category = -1;
  std::array<double, 3> direction{0.0, 0.0, 0.0};
  double depth = 0.0;
};

struct ObservationConfig {
  int n_views = 12;  // heading-only panorama discretization
  int d_view = 20;
  int d_obj = 16;
};

struct EnvConfig {
  int node_count = 30;
  int degree = 3;  // k-nearest-neighbor connectivity
  int vocab_size = 24;
  int objects_per_node = 3;  // per-node object count is uniform in [1, objects_per_node]
  double world_size = 0.0;   // box side in meters; 0 derives it from node_count
  ObservationConfig obs;
};

// Per-node panorama: n view feature rows and the m objects visible there.
struct ViewpointObservation {
  int node = -1;
  numeric::Tensor2 views;            // n_views x d_view
  numeric::Tensor2 object_features;  // m x d_obj (0 x d_obj when no objects)
  std::vector<ObjectPlacement> objects;
};

// Weighted undirected navigation graph with object placements. Immutable
// after generation or load; safe for unrestricted concurrent reads.
class EnvironmentGraph {
 public:
  int node_count() const { return static_cast<int>(positions_.size()); }
  bool has_node(int id) const { return id >= 0 && id < node_count(); }
  const NodePosition& position(int id) const;
  const std::vector<Edge>& edges() const { return edges_; }
  // Neighbors sorted by node id; second element is the edge length.
  const std::vector<std::pair<int, double>>& neighbors(int id) const;
  const std::vector<ObjectPlacement>& objects_at(int id) const;
  std::size_t object_count() const;

  std::uint64_t seed() const { return seed_; }
  const EnvConfig& config() const { return config_; }

  std::string to_json() const;
  static EnvironmentGraph from_json(const std::string& text);
  void save(const std::string& path) const;
  static EnvironmentGraph load(const std::string& path);

 private:
  friend EnvironmentGraph generate_environment(std::uint64_t, const EnvConfig&);
  void rebuild_adjacency();
  void validate() const;

  std::uint64_t seed_ = 0;
  EnvConfig config_;
  std::vector<NodePosition> positions_;
  std::vector<Edge> edges_;
  std::vector<std::vector<ObjectPlacement>> objects_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// Connected k-nearest-neighbor geometric graph over jitter-perturbed grid
// positions, with per-node objects. Deterministic given (seed, config).
// Throws ContractError when the requested parameters cannot produce a
// connected graph after bounded retries.
EnvironmentGraph generate_environment(std::uint64_t seed, const EnvConfig& config);

// Pure function of (environment, node): repeated calls are bit-identical.
ViewpointObservation observe(const EnvironmentGraph& g, int node);

// Feature vector of a single object placement (category projection plus
// direction/depth encoding); shared across environments with the same
// vocabulary and d_obj so category identity transfers between scenes.
std::vector<double> object_feature(const ObjectPlacement& obj, int vocab_size, int d_obj);

}  // namespace relnav::env
