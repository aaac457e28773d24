#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relnav/env/environment.hpp"
#include "relnav/numeric/graph.hpp"
#include "relnav/numeric/tensor.hpp"

namespace relnav::rel {

struct RelationConstants {
  double k1 = 2.0;
  double k2 = 2.0;
  double k3 = 5e-4;
};

// Spatial object-relation matrix over the category vocabulary. Built by
// scanning every node of the training environments and strengthening the
// link between each co-visible object pair; closer pairs (in view direction
// and depth) get larger increments. Symmetric, nonnegative, zero diagonal,
// entries nondecreasing across updates.
class RelationMatrix {
 public:
  RelationMatrix(int vocab_size, RelationConstants constants);

  int vocab_size() const { return vocab_size_; }
  const RelationConstants& constants() const { return constants_; }
  std::uint64_t scan_count() const { return scan_count_; }
  double at(int x, int y) const;

  // Single pair update; x == y is skipped silently (diagonal excluded).
  // Directions must be unit vectors. The denominator carries epsilon = 1e-6
  // so coincident placements produce the finite increment k1/epsilon.
  void update(int x, int y, const std::array<double, 3>& v_x, const std::array<double, 3>& v_y,
              double d_x, double d_y);

  // Applies update() to every unordered object pair co-visible at every
  // node of the environment.
  void scan_environment(const env::EnvironmentGraph& g);

  static RelationMatrix build(std::span<const env::EnvironmentGraph> envs, int vocab_size,
                              RelationConstants constants);

  // E' gather: rows indexed by object categories, columns by noun
  // categories; duplicates produce duplicated rows/columns.
  numeric::Tensor2 query(const std::vector<int>& object_categories,
                         const std::vector<int>& noun_categories) const;

  double max_asymmetry() const;
  double min_entry() const;
  double max_diagonal() const;

  std::string to_json() const;
  static RelationMatrix from_json(const std::string& text);
  void save(const std::string& path) const;
  static RelationMatrix load(const std::string& path);
  void export_csv(const std::string& path) const;

  static constexpr double kEpsilon = 1e-6;

 private:
  double& cell(int x, int y) { return values_[static_cast<std::size_t>(x * vocab_size_ + y)]; }

  int vocab_size_;
  RelationConstants constants_;
  std::uint64_t scan_count_ = 0;
  std::vector<double> values_;
};

// Spatial object features: row-normalized E' times the noun features.
// E' is a constant lookup; gradients flow to the noun features only.
numeric::Var spatial_features(numeric::Graph& g, const numeric::Tensor2& eprime,
                              numeric::Var noun_features);

}  // namespace relnav::rel
