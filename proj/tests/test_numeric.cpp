#include <doctest.h>

#include <cmath>
#include <vector>

#include "relnav/common/error.hpp"
#include "relnav/numeric/grad_check.hpp"
#include "relnav/numeric/graph.hpp"
#include "relnav/numeric/param_store.hpp"
#include "relnav/numeric/rng.hpp"
#include "relnav/numeric/tensor.hpp"

using namespace relnav;
using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Tensor2;
using numeric::Var;

namespace {

// Independent triple-loop oracle for y = xW + b. Kept free of any Graph
// machinery on purpose.
Tensor2 oracle_affine(const Tensor2& x, const Tensor2& w, const Tensor2& b) {
  Tensor2 y(x.rows(), w.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double acc = b.at(0, j);
      for (std::size_t k = 0; k < x.cols(); ++k) acc += x.at(i, k) * w.at(k, j);
      y.at(i, j) = acc;
    }
  }
  return y;
}

Tensor2 random_tensor(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  Tensor2 t(rows, cols);
  for (double& v : t.data()) v = scale * rng.normal();
  return t;
}

// Scalar readout with a fixed random projection so every entry of v gets a
// distinct gradient path.
Var readout(Graph& g, Var v, Rng& rng) {
  return g.sum(g.mul(v, g.constant(random_tensor(rng, v.rows(), v.cols()))));
}

double max_abs_diff(const Tensor2& a, const Tensor2& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("tensor basics and shape errors") {
  Tensor2 t = Tensor2::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 2);
  CHECK(t.at(1, 0) == 3.0);
  CHECK(t.all_finite());

  Graph g;
  Var a = g.constant(Tensor2(2, 3, 1.0));
  Var b = g.constant(Tensor2(3, 2, 1.0));
  CHECK_THROWS_AS(g.add(a, b), ShapeError);
  CHECK_THROWS_AS(g.matmul(a, a), ShapeError);
  CHECK_THROWS_WITH_AS(g.matmul(a, a), doctest::Contains("2x3"), ShapeError);
}

TEST_CASE("affine identity and hand-evaluated examples") {
  Graph g;
  Rng rng(1);
  Tensor2 x = random_tensor(rng, 3, 3);
  Tensor2 eye(3, 3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  Var y = g.affine(g.constant(x), g.constant(eye), g.constant(Tensor2(1, 3, 0.0)));
  CHECK(max_abs_diff(y.value(), x) == 0.0);

  Var y2 = g.affine(g.constant(Tensor2::from_rows({{1.0, 2.0}})),
                    g.constant(Tensor2::from_rows({{1.0, 0.0}, {0.0, 1.0}})),
                    g.constant(Tensor2::from_rows({{1.0, 1.0}})));
  CHECK(y2.value().at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(y2.value().at(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("affine matches triple-loop oracle on random instances up to 64x64") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t r = 1 + rng.index(64);
    const std::size_t k = 1 + rng.index(64);
    const std::size_t c = 1 + rng.index(64);
    Tensor2 x = random_tensor(rng, r, k);
    Tensor2 w = random_tensor(rng, k, c);
    Tensor2 b = random_tensor(rng, 1, c);
    Graph g;
    Var y = g.affine(g.constant(x), g.constant(w), g.constant(b));
    const Tensor2 expect = oracle_affine(x, w, b);
    double scale = 0.0;
    for (double v : expect.data()) scale = std::max(scale, std::fabs(v));
    CHECK(max_abs_diff(y.value(), expect) / std::max(scale, 1e-300) < 1e-12);
  }
}

TEST_CASE("row_softmax values") {
  Graph g;
  Var one = g.row_softmax(g.constant(Tensor2::from_rows({{42.0}})));
  CHECK(one.value().at(0, 0) == 1.0);

  Var uni = g.row_softmax(g.constant(Tensor2(1, 4, 7.25)));
  for (std::size_t j = 0; j < 4; ++j) CHECK(uni.value().at(0, j) == doctest::Approx(0.25));

  Var t = g.row_softmax(g.constant(Tensor2::from_rows({{0.0, std::log(3.0)}})));
  CHECK(t.value().at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t.value().at(0, 1) == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(g.row_softmax(g.constant(Tensor2(1, 0))), ContractError);
}

TEST_CASE("row_softmax properties: rows sum to 1, shift invariance, permutation equivariance") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t r = 1 + rng.index(5);
    const std::size_t c = 1 + rng.index(7);
    Tensor2 x = random_tensor(rng, r, c, 3.0);
    Graph g;
    Tensor2 y = g.row_softmax(g.constant(x)).value();
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        CHECK(y.at(i, j) >= 0.0);
        s += y.at(i, j);
      }
      CHECK(std::fabs(s - 1.0) < 1e-9);
    }

    // Shift invariance: add a per-row constant.
    Tensor2 shifted = x;
    for (std::size_t i = 0; i < r; ++i) {
      const double shift = rng.uniform(-50.0, 50.0);
      for (std::size_t j = 0; j < c; ++j) shifted.at(i, j) += shift;
    }
    Tensor2 y2 = g.row_softmax(g.constant(shifted)).value();
    CHECK(max_abs_diff(y, y2) < 1e-9);

    // Permutation equivariance: reverse the columns.
    Tensor2 rev(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) rev.at(i, j) = x.at(i, c - 1 - j);
    Tensor2 y3 = g.row_softmax(g.constant(rev)).value();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        CHECK(y3.at(i, j) == doctest::Approx(y.at(i, c - 1 - j)).epsilon(1e-12));
      }
  }
}

TEST_CASE("grad_check on a linear objective is nearly exact") {
  ParamStore store;
  Rng rng(3);
  store.create("w", random_tensor(rng, 2, 3));
  Tensor2 c = random_tensor(rng, 2, 3);
  auto f = [&](ParamStore& s) {
    Graph g;
    Var loss = g.sum(g.mul(g.param(s, "w"), g.constant(c)));
    g.backward(loss);
    g.flush_gradients(s);
    return loss.scalar();
  };
  auto report = numeric::grad_check(f, store);
  CHECK(report.max_rel_error < 1e-10);
  CHECK(report.checked == 6);
}

TEST_CASE("grad_check on softmax cross-entropy over random logits") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 100);
    ParamStore store;
    const std::size_t c = 2 + rng.index(6);
    store.create("logits", random_tensor(rng, 1, c, 2.0));
    const std::size_t target = rng.index(c);
    auto f = [&](ParamStore& s) {
      Graph g;
      Var probs = g.row_softmax(g.param(s, "logits"));
      Var loss = g.neg_log_pick(probs, target);
      g.backward(loss);
      g.flush_gradients(s);
      return loss.scalar();
    };
    auto report = numeric::grad_check(f, store);
    CHECK(report.max_rel_error < 1e-4);
  }
}

TEST_CASE("every kernel's backward agrees with central differences over 100 seeds") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed * 7 + 11);
    const std::size_t r = 1 + rng.index(4);
    const std::size_t k = 1 + rng.index(4);
    const std::size_t c = 1 + rng.index(4);
    ParamStore store;
    store.create("a", random_tensor(rng, r, k));
    store.create("b", random_tensor(rng, r, k));
    store.create("w", random_tensor(rng, k, c));
    store.create("bias", random_tensor(rng, 1, c));
    store.create("s", random_tensor(rng, 1, 1));
    Rng ro = rng.fork("readout");

    auto f = [&](ParamStore& s) {
      Rng r2 = ro;  // same constants on every evaluation
      Graph g;
      Var a = g.param(s, "a");
      Var b = g.param(s, "b");
      Var w = g.param(s, "w");
      Var bias = g.param(s, "bias");
      Var sc = g.param(s, "s");

      Var terms = readout(g, g.add(a, b), r2);
      terms = g.add(terms, readout(g, g.sub(a, b), r2));
      terms = g.add(terms, readout(g, g.mul(a, b), r2));
      terms = g.add(terms, readout(g, g.matmul(a, w), r2));
      terms = g.add(terms, readout(g, g.matmul_nt(a, a), r2));
      terms = g.add(terms, readout(g, g.transpose(w), r2));
      terms = g.add(terms, readout(g, g.affine(a, w, bias), r2));
      terms = g.add(terms, readout(g, g.row_softmax(a), r2));
      terms = g.add(terms, readout(g, g.scale(a, 1.7), r2));
      terms = g.add(terms, readout(g, g.scalar_mul(sc, a), r2));
      terms = g.add(terms, readout(g, g.tanh_all(a), r2));
      terms = g.add(terms, g.sum(a));
      terms = g.add(terms, readout(g, g.mean_rows(a), r2));
      terms = g.add(terms, readout(g, g.concat_rows(a, b), r2));
      terms = g.add(terms, readout(g, g.concat_cols_list({a, b, a}), r2));
      terms = g.add(terms, readout(g, g.slice_row(a, r - 1), r2));
      terms = g.add(terms, g.pick(a, 0, 0));
      terms = g.add(terms, readout(g, g.gather_rows(w, {0, k - 1, 0}), r2));

      Var probs = g.row_softmax(g.slice_row(a, 0));
      terms = g.add(terms, g.neg_log_pick(probs, k - 1));
      std::vector<double> weights(k);
      for (std::size_t i = 0; i < k; ++i) weights[i] = static_cast<double>(i) + 0.5;
      terms = g.add(terms, g.softmax_weighted_sum(g.slice_row(a, 0), weights));
      terms = g.add(terms, readout(g, g.gather_cols(g.slice_row(a, 0), {0, k - 1}), r2));

      g.backward(terms);
      g.flush_gradients(s);
      return terms.scalar();
    };
    auto report = numeric::grad_check(f, store);
    worst = std::max(worst, report.max_rel_error);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("sgd_step examples") {
  SUBCASE("zero gradients leave parameters unchanged") {
    ParamStore store;
    Rng rng(5);
    store.create("w", random_tensor(rng, 2, 2));
    Tensor2 before = store.value("w");
    store.step_sgd(0.1);
    CHECK(max_abs_diff(before, store.value("w")) == 0.0);
  }

  SUBCASE("single scalar hand evaluation") {
    ParamStore store;
    store.create("p", Tensor2::scalar(1.0));
    store.grad("p").at(0, 0) = 2.0;
    store.step_sgd(0.1);
    CHECK(store.value("p").at(0, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(store.grad("p").at(0, 0) == 0.0);  // zeroed after the step
  }

  SUBCASE("constant gradient decreases linearly with momentum 0") {
    ParamStore store;
    store.create("p", Tensor2::scalar(1.0));
    store.grad("p").at(0, 0) = 1.0;
    store.step_sgd(0.25);
    store.grad("p").at(0, 0) = 1.0;
    store.step_sgd(0.25);
    CHECK(store.value("p").at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(store.step_count() == 2);
  }

  SUBCASE("non-finite gradient aborts the step and names the parameter") {
    ParamStore store;
    store.create("ok", Tensor2::scalar(1.0));
    store.create("poison", Tensor2::scalar(1.0));
    store.grad("poison").at(0, 0) = std::nan("");
    CHECK_THROWS_WITH_AS(store.step_sgd(0.1), doctest::Contains("poison"), ContractError);
    CHECK(store.value("ok").at(0, 0) == 1.0);  // untouched
  }
}

TEST_CASE("param store serialization round-trips") {
  ParamStore store;
  Rng rng(9);
  store.create("alpha", random_tensor(rng, 2, 3));
  store.create("beta", random_tensor(rng, 1, 1));
  const std::string text = store.to_json();
  ParamStore back = ParamStore::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(max_abs_diff(back.value("alpha"), store.value("alpha")) == 0.0);
}

TEST_CASE("rng determinism and fork independence") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 32; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng base(7);
  Rng f1 = base.fork("stream-1");
  Rng f2 = base.fork("stream-2");
  CHECK(f1.next_u64() != f2.next_u64());

  // Forking does not advance the parent.
  Rng c(9), d(9);
  (void)c.fork(123);
  CHECK(c.next_u64() == d.next_u64());

  Rng u(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("neg_log_pick clamps at the floor and counts the event") {
  Graph g;
  Var row = g.constant(Tensor2::from_rows({{0.0, 1.0}}));
  Var loss = g.neg_log_pick(row, 0, 1e-12);
  CHECK(loss.scalar() == doctest::Approx(-std::log(1e-12)));
  CHECK(g.clamp_events() == 1);
}
