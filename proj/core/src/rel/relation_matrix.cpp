#include "relnav/rel/relation_matrix.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "relnav/common/error.hpp"

namespace relnav::rel {

using numeric::Tensor2;
using numeric::Var;

RelationMatrix::RelationMatrix(int vocab_size, RelationConstants constants)
    : vocab_size_(vocab_size), constants_(constants) {
  if (vocab_size < 1) throw ContractError("RelationMatrix: vocab_size must be >= 1");
  values_.assign(static_cast<std::size_t>(vocab_size) * static_cast<std::size_t>(vocab_size),
                 0.0);
}

double RelationMatrix::at(int x, int y) const {
  if (x < 0 || x >= vocab_size_ || y < 0 || y >= vocab_size_) {
    throw LookupError("RelationMatrix::at: category index out of range");
  }
  return values_[static_cast<std::size_t>(x * vocab_size_ + y)];
}

void RelationMatrix::update(int x, int y, const std::array<double, 3>& v_x,
                            const std::array<double, 3>& v_y, double d_x, double d_y) {
  if (x < 0 || x >= vocab_size_ || y < 0 || y >= vocab_size_) {
    throw LookupError("RelationMatrix::update: category index out of range");
  }
  if (x == y) return;  // diagonal excluded
  auto check_unit = [](const std::array<double, 3>& v) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (std::fabs(norm - 1.0) > 1e-9) {
      throw ContractError("RelationMatrix::update: direction is not unit length");
    }
  };
  check_unit(v_x);
  check_unit(v_y);
  const double dvx = v_x[0] - v_y[0], dvy = v_x[1] - v_y[1], dvz = v_x[2] - v_y[2];
  const double dir_gap = std::sqrt(dvx * dvx + dvy * dvy + dvz * dvz);
  const double depth_gap = std::fabs(d_x - d_y);
  const double increment =
      constants_.k1 / (constants_.k2 * dir_gap + constants_.k3 * depth_gap + kEpsilon);
  cell(x, y) += increment;
  cell(y, x) += increment;
}

void RelationMatrix::scan_environment(const env::EnvironmentGraph& g) {
  for (int node = 0; node < g.node_count(); ++node) {
    const auto& objs = g.objects_at(node);
    for (std::size_t i = 0; i < objs.size(); ++i) {
      for (std::size_t j = i + 1; j < objs.size(); ++j) {
        update(objs[i].category, objs[j].category, objs[i].direction, objs[j].direction,
               objs[i].depth, objs[j].depth);
      }
    }
  }
  ++scan_count_;
}

RelationMatrix RelationMatrix::build(std::span<const env::EnvironmentGraph> envs, int vocab_size,
                                     RelationConstants constants) {
  RelationMatrix m(vocab_size, constants);
  for (const auto& g : envs) m.scan_environment(g);
  return m;
}

Tensor2 RelationMatrix::query(const std::vector<int>& object_categories,
                              const std::vector<int>& noun_categories) const {
  Tensor2 out(object_categories.size(), noun_categories.size());
  for (std::size_t i = 0; i < object_categories.size(); ++i) {
    for (std::size_t j = 0; j < noun_categories.size(); ++j) {
      out.at(i, j) = at(object_categories[i], noun_categories[j]);
    }
  }
  return out;
}

double RelationMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int x = 0; x < vocab_size_; ++x) {
    for (int y = x + 1; y < vocab_size_; ++y) {
      worst = std::max(worst, std::fabs(at(x, y) - at(y, x)));
    }
  }
  return worst;
}

double RelationMatrix::min_entry() const {
  double lowest = 0.0;
  for (double v : values_) lowest = std::min(lowest, v);
  return lowest;
}

double RelationMatrix::max_diagonal() const {
  double worst = 0.0;
  for (int x = 0; x < vocab_size_; ++x) worst = std::max(worst, std::fabs(at(x, x)));
  return worst;
}

std::string RelationMatrix::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["vocab_size"] = vocab_size_;
  j["k1"] = constants_.k1;
  j["k2"] = constants_.k2;
  j["k3"] = constants_.k3;
  j["scan_count"] = scan_count_;
  j["values"] = values_;
  return j.dump(2);
}

RelationMatrix RelationMatrix::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("relation matrix: invalid JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw IoError("relation matrix: unsupported or missing schema_version");
  }
  RelationMatrix m(j.at("vocab_size").get<int>(),
                   {j.at("k1").get<double>(), j.at("k2").get<double>(), j.at("k3").get<double>()});
  m.scan_count_ = j.at("scan_count").get<std::uint64_t>();
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != m.values_.size()) {
    throw IoError("relation matrix: values length does not match vocab_size^2");
  }
  m.values_ = std::move(values);
  return m;
}

void RelationMatrix::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("RelationMatrix::save: cannot open " + path);
  out << to_json() << "\n";
}

RelationMatrix RelationMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("RelationMatrix::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

void RelationMatrix::export_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("RelationMatrix::export_csv: cannot open " + path);
  for (int x = 0; x < vocab_size_; ++x) {
    for (int y = 0; y < vocab_size_; ++y) {
      if (y) out << ',';
      out << at(x, y);
    }
    out << '\n';
  }
}

Var spatial_features(numeric::Graph& g, const Tensor2& eprime, Var noun_features) {
  if (eprime.cols() != noun_features.rows()) {
    throw ShapeError("spatial_features: E' " + eprime.shape_str() + " vs noun features " +
                     noun_features.value().shape_str());
  }
  // Row-normalize the constant lookup so raw co-occurrence magnitudes do not
  // swamp the fused feature; zero rows stay zero via the epsilon guard.
  Tensor2 normalized = eprime;
  for (std::size_t i = 0; i < normalized.rows(); ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < normalized.cols(); ++j) row_sum += normalized.at(i, j);
    const double denom = std::max(row_sum, RelationMatrix::kEpsilon);
    for (std::size_t j = 0; j < normalized.cols(); ++j) normalized.at(i, j) /= denom;
  }
  return g.matmul(g.constant(std::move(normalized)), noun_features);
}

}  // namespace relnav::rel
