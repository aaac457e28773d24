#include "relnav/numeric/param_store.hpp"

#include <fstream>

#include <json.hpp>

#include "relnav/common/error.hpp"

namespace relnav::numeric {

Tensor2& ParamStore::create(const std::string& name, Tensor2 init) {
  if (entries_.count(name)) {
    throw ContractError("ParamStore::create: parameter already exists: " + name);
  }
  Entry e;
  e.grad = Tensor2(init.rows(), init.cols(), 0.0);
  e.momentum = Tensor2(init.rows(), init.cols(), 0.0);
  e.value = std::move(init);
  return entries_.emplace(name, std::move(e)).first->second.value;
}

Tensor2& ParamStore::create_normal(const std::string& name, std::size_t rows, std::size_t cols,
                                   Rng& rng, double stddev) {
  Tensor2 t(rows, cols);
  for (double& v : t.data()) v = stddev * rng.normal();
  return create(name, std::move(t));
}

Tensor2& ParamStore::create_zeros(const std::string& name, std::size_t rows, std::size_t cols) {
  return create(name, Tensor2(rows, cols, 0.0));
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw LookupError("ParamStore: unknown parameter: " + name);
  return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw LookupError("ParamStore: unknown parameter: " + name);
  return it->second;
}

Tensor2& ParamStore::value(const std::string& name) { return entry(name).value; }
const Tensor2& ParamStore::value(const std::string& name) const { return entry(name).value; }
Tensor2& ParamStore::grad(const std::string& name) { return entry(name).grad; }
const Tensor2& ParamStore::grad(const std::string& name) const { return entry(name).grad; }

void ParamStore::zero_grads() {
  for (auto& [name, e] : entries_) e.grad.fill(0.0);
}

void ParamStore::step_sgd(double lr, double momentum) {
  for (const auto& [name, e] : entries_) {
    if (!e.grad.all_finite()) {
      throw ContractError("ParamStore::step_sgd: non-finite gradient for parameter " + name);
    }
  }
  for (auto& [name, e] : entries_) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      double update = e.grad[i];
      if (momentum > 0.0) {
        e.momentum[i] = momentum * e.momentum[i] + e.grad[i];
        update = e.momentum[i];
      }
      e.value[i] -= lr * update;
    }
    e.grad.fill(0.0);
  }
  ++step_count_;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

std::string ParamStore::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["step_count"] = step_count_;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, e] : entries_) {
    params[name] = {{"rows", e.value.rows()}, {"cols", e.value.cols()}, {"data", e.value.data()}};
  }
  j["params"] = std::move(params);
  return j.dump(2);
}

ParamStore ParamStore::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw IoError("ParamStore: unsupported or missing schema_version");
  }
  ParamStore store;
  store.step_count_ = j.value("step_count", std::size_t{0});
  for (const auto& [name, pj] : j.at("params").items()) {
    Tensor2 t(pj.at("rows").get<std::size_t>(), pj.at("cols").get<std::size_t>());
    auto data = pj.at("data").get<std::vector<double>>();
    if (data.size() != t.size()) {
      throw IoError("ParamStore: data length mismatch for parameter " + name);
    }
    t.data() = std::move(data);
    store.create(name, std::move(t));
  }
  return store;
}

void ParamStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("ParamStore::save: cannot open " + path);
  out << to_json() << "\n";
}

ParamStore ParamStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("ParamStore::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace relnav::numeric
