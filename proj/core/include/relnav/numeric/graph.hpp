#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relnav/numeric/param_store.hpp"
#include "relnav/numeric/tensor.hpp"

namespace relnav::numeric {

class Graph;

// Handle to a node on a Graph tape. Cheap to copy; invalidated when the
// owning Graph is destroyed.
class Var {
 public:
  Var() = default;
  bool defined() const { return graph_ != nullptr; }
  const Tensor2& value() const;
  const Tensor2& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
  Graph* graph() const { return graph_; }

 private:
  friend class Graph;
  Var(Graph* g, int id) : graph_(g), id_(id) {}
  Graph* graph_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape over Tensor2 values. One Graph is built per forward
// pass (typically per episode); backward() runs the tape once in reverse
// and flush_gradients() accumulates leaf gradients into a ParamStore.
//
// Every op validates shapes up front and checks its output for NaN/Inf, so
// a non-finite value is reported at the op that produced it.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor2 v);
  Var constant_scalar(double v) { return constant(Tensor2::scalar(v)); }
  // Leaf bound to a named parameter; repeated calls with the same name
  // return the same node so gradients accumulate in one place.
  Var param(ParamStore& store, const std::string& name);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var transpose(Var a);
  // x*W + b with b (1 x out) broadcast over rows.
  Var affine(Var x, Var w, Var b);
  Var row_softmax(Var a);
  Var scale(Var a, double c);
  Var scalar_mul(Var s, Var a);  // s is 1x1
  Var tanh_all(Var a);
  Var sum(Var a);        // 1x1
  Var mean_rows(Var a);  // 1 x cols
  Var concat_rows(Var a, Var b);
  Var concat_cols(Var a, Var b);
  Var concat_cols_list(const std::vector<Var>& parts);
  Var slice_row(Var a, std::size_t r);
  Var pick(Var a, std::size_t r, std::size_t c);  // 1x1
  Var gather_rows(Var table, const std::vector<std::size_t>& idx);
  Var gather_cols(Var row, const std::vector<std::size_t>& idx);
  // -log(max(row[idx], floor)); clamped picks increment clamp_events() and
  // propagate zero gradient.
  Var neg_log_pick(Var row, std::size_t idx, double floor = 1e-12);
  // sum_i softmax(p)_i * w_i with constant weights w; backward uses the
  // closed form d/dp_k = softmax(p)_k * (w_k - value).
  Var softmax_weighted_sum(Var p_row, std::vector<double> weights);

  void backward(Var loss);
  void flush_gradients(ParamStore& store) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t clamp_events() const { return clamp_events_; }

 private:
  friend class Var;

  struct Node {
    Tensor2 value;
    Tensor2 grad;
    std::function<void(Graph&)> backprop;  // null for leaves
  };

  int add_node(Tensor2 value, const char* op, std::function<void(Graph&)> backprop = nullptr);
  Var wrap(int id) { return Var(this, id); }
  Tensor2& grad_of(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Tensor2& value_of(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  void require_mine(Var v, const char* op) const;

  std::vector<Node> nodes_;
  std::map<std::pair<const ParamStore*, std::string>, int> param_nodes_;
  std::vector<std::pair<int, std::string>> bindings_;
  std::size_t clamp_events_ = 0;
  bool backward_done_ = false;
};

}  // namespace relnav::numeric
