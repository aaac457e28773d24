#include "relnav/numeric/graph.hpp"

#include <algorithm>
#include <cmath>

#include "relnav/common/error.hpp"

namespace relnav::numeric {

const Tensor2& Var::value() const {
  if (!graph_) throw ContractError("Var::value: undefined variable");
  return graph_->value_of(id_);
}

const Tensor2& Var::grad() const {
  if (!graph_) throw ContractError("Var::grad: undefined variable");
  return graph_->nodes_[static_cast<std::size_t>(id_)].grad;
}

double Var::scalar() const {
  const Tensor2& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("Var::scalar: expected 1x1, got " + v.shape_str());
  }
  return v.at(0, 0);
}

int Graph::add_node(Tensor2 value, const char* op, std::function<void(Graph&)> backprop) {
  if (!value.all_finite()) {
    throw ContractError(std::string("Graph: non-finite values produced by op ") + op);
  }
  Node n;
  n.value = std::move(value);
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Graph::require_mine(Var v, const char* op) const {
  if (v.graph_ != this) {
    throw ContractError(std::string(op) + ": variable does not belong to this graph");
  }
}

Var Graph::constant(Tensor2 v) { return wrap(add_node(std::move(v), "constant")); }

Var Graph::param(ParamStore& store, const std::string& name) {
  auto key = std::make_pair(static_cast<const ParamStore*>(&store), name);
  auto it = param_nodes_.find(key);
  if (it != param_nodes_.end()) return wrap(it->second);
  int id = add_node(store.value(name), "param");
  param_nodes_.emplace(key, id);
  bindings_.emplace_back(id, name);
  return wrap(id);
}

Var Graph::add(Var a, Var b) {
  require_mine(a, "add");
  require_mine(b, "add");
  const Tensor2& av = a.value();
  const Tensor2& bv = b.value();
  require_same_shape(av, bv, "add");
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  int ia = a.id_, ib = b.id_;
  int id = add_node(std::move(out), "add");
  nodes_.back().backprop = [ia, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    Tensor2& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i];
      gb[i] += go[i];
    }
  };
  return wrap(id);
}

Var Graph::sub(Var a, Var b) {
  require_mine(a, "sub");
  require_mine(b, "sub");
  const Tensor2& av = a.value();
  const Tensor2& bv = b.value();
  require_same_shape(av, bv, "sub");
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  int ia = a.id_, ib = b.id_;
  int id = add_node(std::move(out), "sub");
  nodes_.back().backprop = [ia, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    Tensor2& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i];
      gb[i] -= go[i];
    }
  };
  return wrap(id);
}

Var Graph::mul(Var a, Var b) {
  require_mine(a, "mul");
  require_mine(b, "mul");
  const Tensor2& av = a.value();
  const Tensor2& bv = b.value();
  require_same_shape(av, bv, "mul");
  Tensor2 out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  int ia = a.id_, ib = b.id_;
  int id = add_node(std::move(out), "mul");
  nodes_.back().backprop = [ia, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    const Tensor2& av2 = g.value_of(ia);
    const Tensor2& bv2 = g.value_of(ib);
    Tensor2& ga = g.grad_of(ia);
    Tensor2& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < go.size(); ++i) {
      ga[i] += go[i] * bv2[i];
      gb[i] += go[i] * av2[i];
    }
  };
  return wrap(id);
}

namespace {

Tensor2 matmul_values(const Tensor2& a, const Tensor2& b) {
  Tensor2 out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

Tensor2 matmul_nt_values(const Tensor2& a, const Tensor2& b) {
  // a (r x k) * b^T (k x c) with b stored (c x k)
  Tensor2 out(a.rows(), b.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(j, k);
      out.at(i, j) = acc;
    }
  }
  return out;
}

Tensor2 matmul_tn_values(const Tensor2& a, const Tensor2& b) {
  // a^T (k x r) * b (r x c) with a stored (r x k)
  Tensor2 out(a.cols(), b.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = a.at(r, i);
      if (ari == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out.at(i, j) += ari * b.at(r, j);
      }
    }
  }
  return out;
}

void accumulate(Tensor2& dst, const Tensor2& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Var Graph::matmul(Var a, Var b) {
  require_mine(a, "matmul");
  require_mine(b, "matmul");
  require_matmul_shapes(a.value(), b.value(), "matmul");
  int ia = a.id_, ib = b.id_;
  int id = add_node(matmul_values(a.value(), b.value()), "matmul");
  nodes_.back().backprop = [ia, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    // dA = G * B^T ; dB = A^T * G
    accumulate(g.grad_of(ia), matmul_nt_values(go, g.value_of(ib)));
    accumulate(g.grad_of(ib), matmul_tn_values(g.value_of(ia), go));
  };
  return wrap(id);
}

Var Graph::matmul_nt(Var a, Var b) {
  require_mine(a, "matmul_nt");
  require_mine(b, "matmul_nt");
  if (a.value().cols() != b.value().cols()) {
    throw ShapeError("matmul_nt: inner dimensions do not match, " + a.value().shape_str() +
                     " * transpose(" + b.value().shape_str() + ")");
  }
  int ia = a.id_, ib = b.id_;
  int id = add_node(matmul_nt_values(a.value(), b.value()), "matmul_nt");
  nodes_.back().backprop = [ia, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    // Y = A B^T: dA = G * B ; dB = G^T * A
    accumulate(g.grad_of(ia), matmul_values(go, g.value_of(ib)));
    accumulate(g.grad_of(ib), matmul_tn_values(go, g.value_of(ia)));
  };
  return wrap(id);
}

Var Graph::transpose(Var a) {
  require_mine(a, "transpose");
  const Tensor2& av = a.value();
  Tensor2 out(av.cols(), av.rows());
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out.at(j, i) = av.at(i, j);
  int ia = a.id_;
  int id = add_node(std::move(out), "transpose");
  nodes_.back().backprop = [ia, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < go.rows(); ++i)
      for (std::size_t j = 0; j < go.cols(); ++j) ga.at(j, i) += go.at(i, j);
  };
  return wrap(id);
}

Var Graph::affine(Var x, Var w, Var b) {
  require_mine(x, "affine");
  require_mine(w, "affine");
  require_mine(b, "affine");
  const Tensor2& xv = x.value();
  const Tensor2& wv = w.value();
  const Tensor2& bv = b.value();
  require_matmul_shapes(xv, wv, "affine");
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw ShapeError("affine: bias must be 1x" + std::to_string(wv.cols()) + ", got " +
                     bv.shape_str());
  }
  Tensor2 out = matmul_values(xv, wv);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += bv.at(0, j);
  int ix = x.id_, iw = w.id_, ib = b.id_;
  int id = add_node(std::move(out), "affine");
  nodes_.back().backprop = [ix, iw, ib, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    accumulate(g.grad_of(ix), matmul_nt_values(go, g.value_of(iw)));
    accumulate(g.grad_of(iw), matmul_tn_values(g.value_of(ix), go));
    Tensor2& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < go.rows(); ++i)
      for (std::size_t j = 0; j < go.cols(); ++j) gb.at(0, j) += go.at(i, j);
  };
  return wrap(id);
}

Var Graph::row_softmax(Var a) {
  require_mine(a, "row_softmax");
  const Tensor2& av = a.value();
  if (av.cols() == 0) throw ContractError("row_softmax: empty row");
  Tensor2 out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double mx = av.at(i, 0);
    for (std::size_t j = 1; j < av.cols(); ++j) mx = std::max(mx, av.at(i, j));
    double denom = 0.0;
    for (std::size_t j = 0; j < av.cols(); ++j) {
      out.at(i, j) = std::exp(av.at(i, j) - mx);
      denom += out.at(i, j);
    }
    for (std::size_t j = 0; j < av.cols(); ++j) out.at(i, j) /= denom;
  }
  int ia = a.id_;
  int id = add_node(std::move(out), "row_softmax");
  nodes_.back().backprop = [ia, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    const Tensor2& y = g.value_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += go.at(i, j) * y.at(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) {
        ga.at(i, j) += y.at(i, j) * (go.at(i, j) - dot);
      }
    }
  };
  return wrap(id);
}

Var Graph::scale(Var a, double c) {
  require_mine(a, "scale");
  Tensor2 out = a.value();
  for (double& v : out.data()) v *= c;
  int ia = a.id_;
  int id = add_node(std::move(out), "scale");
  nodes_.back().backprop = [ia, id, c](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += c * go[i];
  };
  return wrap(id);
}

Var Graph::scalar_mul(Var s, Var a) {
  require_mine(s, "scalar_mul");
  require_mine(a, "scalar_mul");
  if (s.value().rows() != 1 || s.value().cols() != 1) {
    throw ShapeError("scalar_mul: scalar operand must be 1x1, got " + s.value().shape_str());
  }
  const double sv = s.value().at(0, 0);
  Tensor2 out = a.value();
  for (double& v : out.data()) v *= sv;
  int is = s.id_, ia = a.id_;
  int id = add_node(std::move(out), "scalar_mul");
  nodes_.back().backprop = [is, ia, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    const Tensor2& av = g.value_of(ia);
    const double sval = g.value_of(is).at(0, 0);
    Tensor2& gs = g.grad_of(is);
    Tensor2& ga = g.grad_of(ia);
    double acc = 0.0;
    for (std::size_t i = 0; i < go.size(); ++i) {
      acc += go[i] * av[i];
      ga[i] += sval * go[i];
    }
    gs.at(0, 0) += acc;
  };
  return wrap(id);
}

Var Graph::tanh_all(Var a) {
  require_mine(a, "tanh");
  Tensor2 out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  int ia = a.id_;
  int id = add_node(std::move(out), "tanh");
  nodes_.back().backprop = [ia, id](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    const Tensor2& y = g.value_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * (1.0 - y[i] * y[i]);
  };
  return wrap(id);
}

Var Graph::sum(Var a) {
  require_mine(a, "sum");
  double acc = 0.0;
  for (double v : a.value().data()) acc += v;
  int ia = a.id_;
  int id = add_node(Tensor2::scalar(acc), "sum");
  nodes_.back().backprop = [ia, id](Graph& g) {
    const double go = g.grad_of(id).at(0, 0);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go;
  };
  return wrap(id);
}

Var Graph::mean_rows(Var a) {
  require_mine(a, "mean_rows");
  const Tensor2& av = a.value();
  if (av.rows() == 0) throw ContractError("mean_rows: no rows");
  Tensor2 out(1, av.cols(), 0.0);
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out.at(0, j) += av.at(i, j);
  const double inv = 1.0 / static_cast<double>(av.rows());
  for (double& v : out.data()) v *= inv;
  int ia = a.id_;
  int id = add_node(std::move(out), "mean_rows");
  nodes_.back().backprop = [ia, id, inv](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < ga.cols(); ++j) ga.at(i, j) += inv * go.at(0, j);
  };
  return wrap(id);
}

Var Graph::concat_rows(Var a, Var b) {
  require_mine(a, "concat_rows");
  require_mine(b, "concat_rows");
  const Tensor2& av = a.value();
  const Tensor2& bv = b.value();
  if (av.cols() != bv.cols()) {
    throw ShapeError("concat_rows: column mismatch " + av.shape_str() + " vs " + bv.shape_str());
  }
  Tensor2 out(av.rows() + bv.rows(), av.cols());
  std::copy(av.data().begin(), av.data().end(), out.data().begin());
  std::copy(bv.data().begin(), bv.data().end(),
            out.data().begin() + static_cast<std::ptrdiff_t>(av.size()));
  int ia = a.id_, ib = b.id_;
  const std::size_t split = av.size();
  int id = add_node(std::move(out), "concat_rows");
  nodes_.back().backprop = [ia, ib, id, split](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    Tensor2& gb = g.grad_of(ib);
    for (std::size_t i = 0; i < split; ++i) ga[i] += go[i];
    for (std::size_t i = split; i < go.size(); ++i) gb[i - split] += go[i];
  };
  return wrap(id);
}

Var Graph::concat_cols(Var a, Var b) { return concat_cols_list({a, b}); }

Var Graph::concat_cols_list(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_cols_list: no parts");
  std::size_t rows = parts.front().value().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    require_mine(p, "concat_cols_list");
    if (p.value().rows() != rows) {
      throw ShapeError("concat_cols_list: row mismatch " + p.value().shape_str() + " vs " +
                       std::to_string(rows) + " rows");
    }
    cols += p.value().cols();
  }
  Tensor2 out(rows, cols);
  std::vector<int> ids;
  std::vector<std::size_t> widths;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor2& pv = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < pv.cols(); ++j) out.at(i, offset + j) = pv.at(i, j);
    ids.push_back(p.id_);
    widths.push_back(pv.cols());
    offset += pv.cols();
  }
  int id = add_node(std::move(out), "concat_cols");
  nodes_.back().backprop = [ids, widths, id, rows](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      Tensor2& gp = g.grad_of(ids[k]);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < widths[k]; ++j) gp.at(i, j) += go.at(i, off + j);
      off += widths[k];
    }
  };
  return wrap(id);
}

Var Graph::slice_row(Var a, std::size_t r) {
  require_mine(a, "slice_row");
  const Tensor2& av = a.value();
  if (r >= av.rows()) {
    throw ShapeError("slice_row: row " + std::to_string(r) + " out of range for " +
                     av.shape_str());
  }
  Tensor2 out(1, av.cols());
  for (std::size_t j = 0; j < av.cols(); ++j) out.at(0, j) = av.at(r, j);
  int ia = a.id_;
  int id = add_node(std::move(out), "slice_row");
  nodes_.back().backprop = [ia, id, r](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& ga = g.grad_of(ia);
    for (std::size_t j = 0; j < go.cols(); ++j) ga.at(r, j) += go.at(0, j);
  };
  return wrap(id);
}

Var Graph::pick(Var a, std::size_t r, std::size_t c) {
  require_mine(a, "pick");
  const Tensor2& av = a.value();
  if (r >= av.rows() || c >= av.cols()) {
    throw ShapeError("pick: index (" + std::to_string(r) + "," + std::to_string(c) +
                     ") out of range for " + av.shape_str());
  }
  int ia = a.id_;
  int id = add_node(Tensor2::scalar(av.at(r, c)), "pick");
  nodes_.back().backprop = [ia, id, r, c](Graph& g) {
    g.grad_of(ia).at(r, c) += g.grad_of(id).at(0, 0);
  };
  return wrap(id);
}

Var Graph::gather_rows(Var table, const std::vector<std::size_t>& idx) {
  require_mine(table, "gather_rows");
  const Tensor2& tv = table.value();
  if (idx.empty()) throw ContractError("gather_rows: empty index list");
  Tensor2 out(idx.size(), tv.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= tv.rows()) {
      throw ShapeError("gather_rows: index " + std::to_string(idx[i]) + " out of range for " +
                       tv.shape_str());
    }
    for (std::size_t j = 0; j < tv.cols(); ++j) out.at(i, j) = tv.at(idx[i], j);
  }
  int it = table.id_;
  int id = add_node(std::move(out), "gather_rows");
  nodes_.back().backprop = [it, id, idx](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& gt = g.grad_of(it);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < go.cols(); ++j) gt.at(idx[i], j) += go.at(i, j);
  };
  return wrap(id);
}

Var Graph::gather_cols(Var row, const std::vector<std::size_t>& idx) {
  require_mine(row, "gather_cols");
  const Tensor2& rv = row.value();
  if (rv.rows() != 1) throw ShapeError("gather_cols: expected a row vector, got " + rv.shape_str());
  if (idx.empty()) throw ContractError("gather_cols: empty index list");
  Tensor2 out(1, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= rv.cols()) {
      throw ShapeError("gather_cols: index " + std::to_string(idx[j]) + " out of range for " +
                       rv.shape_str());
    }
    out.at(0, j) = rv.at(0, idx[j]);
  }
  int ir = row.id_;
  int id = add_node(std::move(out), "gather_cols");
  nodes_.back().backprop = [ir, id, idx](Graph& g) {
    const Tensor2& go = g.grad_of(id);
    Tensor2& gr = g.grad_of(ir);
    for (std::size_t j = 0; j < idx.size(); ++j) gr.at(0, idx[j]) += go.at(0, j);
  };
  return wrap(id);
}

Var Graph::neg_log_pick(Var row, std::size_t idx, double floor) {
  require_mine(row, "neg_log_pick");
  const Tensor2& rv = row.value();
  if (rv.rows() != 1) {
    throw ShapeError("neg_log_pick: expected a row vector, got " + rv.shape_str());
  }
  if (idx >= rv.cols()) {
    throw ShapeError("neg_log_pick: index " + std::to_string(idx) + " out of range for " +
                     rv.shape_str());
  }
  const double v = rv.at(0, idx);
  const bool clamped = v < floor;
  if (clamped) ++clamp_events_;
  int ir = row.id_;
  int id = add_node(Tensor2::scalar(-std::log(clamped ? floor : v)), "neg_log_pick");
  nodes_.back().backprop = [ir, id, idx, clamped](Graph& g) {
    if (clamped) return;
    const double go = g.grad_of(id).at(0, 0);
    g.grad_of(ir).at(0, idx) += -go / g.value_of(ir).at(0, idx);
  };
  return wrap(id);
}

Var Graph::softmax_weighted_sum(Var p_row, std::vector<double> weights) {
  require_mine(p_row, "softmax_weighted_sum");
  const Tensor2& pv = p_row.value();
  if (pv.rows() != 1) {
    throw ShapeError("softmax_weighted_sum: expected a row vector, got " + pv.shape_str());
  }
  if (pv.cols() != weights.size() || weights.empty()) {
    throw ShapeError("softmax_weighted_sum: " + std::to_string(weights.size()) +
                     " weights for row " + pv.shape_str());
  }
  const std::size_t r = pv.cols();
  std::vector<double> soft(r);
  double mx = pv.at(0, 0);
  for (std::size_t j = 1; j < r; ++j) mx = std::max(mx, pv.at(0, j));
  double denom = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    soft[j] = std::exp(pv.at(0, j) - mx);
    denom += soft[j];
  }
  double loss = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    soft[j] /= denom;
    loss += soft[j] * weights[j];
  }
  int ip = p_row.id_;
  int id = add_node(Tensor2::scalar(loss), "softmax_weighted_sum");
  nodes_.back().backprop = [ip, id, soft = std::move(soft), weights = std::move(weights),
                            loss](Graph& g) {
    const double go = g.grad_of(id).at(0, 0);
    Tensor2& gp = g.grad_of(ip);
    for (std::size_t j = 0; j < soft.size(); ++j) {
      gp.at(0, j) += go * soft[j] * (weights[j] - loss);
    }
  };
  return wrap(id);
}

void Graph::backward(Var loss) {
  require_mine(loss, "backward");
  if (backward_done_) throw ContractError("Graph::backward: already run on this graph");
  const Tensor2& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + lv.shape_str());
  }
  for (Node& n : nodes_) n.grad = Tensor2(n.value.rows(), n.value.cols(), 0.0);
  grad_of(loss.id_).at(0, 0) = 1.0;
  for (int i = loss.id_; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.backprop) n.backprop(*this);
  }
  backward_done_ = true;
}

void Graph::flush_gradients(ParamStore& store) const {
  if (!backward_done_) throw ContractError("Graph::flush_gradients: backward has not run");
  for (const auto& [id, name] : bindings_) {
    const Tensor2& g = nodes_[static_cast<std::size_t>(id)].grad;
    if (!g.all_finite()) {
      throw ContractError("Graph::flush_gradients: non-finite gradient for parameter " + name);
    }
    Tensor2& dst = store.grad(name);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
  }
}

}  // namespace relnav::numeric
