#pragma once

#include <map>
#include <string>
#include <vector>

#include "relnav/numeric/rng.hpp"
#include "relnav/numeric/tensor.hpp"

namespace relnav::numeric {

// Named parameter tensors with same-shape gradient accumulators and SGD
// momentum state. Single logical writer during training; rollouts read a
// frozen store.
class ParamStore {
 public:
  struct Entry {
    Tensor2 value;
    Tensor2 grad;
    Tensor2 momentum;
  };

  // Registers a new parameter. Throws ContractError if the name exists.
  Tensor2& create(const std::string& name, Tensor2 init);

  // Convenience initializers.
  Tensor2& create_normal(const std::string& name, std::size_t rows, std::size_t cols, Rng& rng,
                         double stddev);
  Tensor2& create_zeros(const std::string& name, std::size_t rows, std::size_t cols);

  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor2& value(const std::string& name);
  const Tensor2& value(const std::string& name) const;
  Tensor2& grad(const std::string& name);
  const Tensor2& grad(const std::string& name) const;

  void zero_grads();

  // params <- params - lr * grad (Polyak momentum when momentum > 0), then
  // gradients are zeroed. A non-finite gradient aborts the step before any
  // parameter is touched, naming the offending parameter.
  void step_sgd(double lr, double momentum = 0.0);

  std::vector<std::string> names() const;
  std::size_t scalar_count() const;
  std::size_t step_count() const { return step_count_; }

  std::string to_json() const;
  static ParamStore from_json(const std::string& text);
  void save(const std::string& path) const;
  static ParamStore load(const std::string& path);

 private:
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  // std::map keeps iteration order deterministic for serialization and SGD.
  std::map<std::string, Entry> entries_;
  std::size_t step_count_ = 0;
};

}  // namespace relnav::numeric
