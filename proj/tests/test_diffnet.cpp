#include <cmath>
#include <vector>

#include "doctest.h"
#include "qppnet/diffnet/graph.hpp"
#include "qppnet/diffnet/optim.hpp"
#include "qppnet/error.hpp"

using namespace qppnet;
using namespace qppnet::diffnet;

namespace {

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_SUITE("diffnet") {

TEST_CASE("tensor rejects bad shapes and non-finite values") {
  CHECK_THROWS_AS(Tensor(2, 2, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Tensor({1.0, NAN}), DimensionError);
  CHECK_THROWS_AS(Tensor({INFINITY}), DimensionError);
  const Tensor v({1, 2, 3});
  CHECK(v.rank() == 1);
  CHECK(v.rows() == 1);
  CHECK(v.cols() == 3);
}

TEST_CASE("affine examples") {
  Graph g;
  Param w0("w0", Tensor(2, 2, {0, 0, 0, 0}));
  Param b0("b0", Tensor({0, 0}));
  Param eye("eye", Tensor(2, 2, {1, 0, 0, 1}));
  Param one("one", Tensor({1, 1}));
  Param m("m", Tensor(2, 2, {1, 2, 3, 4}));

  CHECK(values(g.value(g.affine(w0, b0, g.input(Tensor({7, -9}))))) == std::vector<double>{0, 0});
  CHECK(values(g.value(g.affine(eye, one, g.input(Tensor({2, 3}))))) == std::vector<double>{3, 4});
  CHECK(values(g.value(g.affine(m, b0, g.input(Tensor({1, 1}))))) == std::vector<double>{3, 7});
}

TEST_CASE("affine shape mismatch") {
  Graph g;
  Param w("w", Tensor(2, 3, {1, 2, 3, 4, 5, 6}));
  Param b("b", Tensor({0, 0}));
  Param bad_b("bad", Tensor({0, 0, 0}));
  CHECK_THROWS_AS(g.affine(w, b, g.input(Tensor({1, 2}))), DimensionError);
  CHECK_THROWS_AS(g.affine(w, bad_b, g.input(Tensor({1, 2, 3}))), DimensionError);
}

TEST_CASE("affine rows are independent of batch size") {
  Param w("w", Tensor(2, 3, {0.1, -0.7, 0.3, 1.9, 0.2, -0.4}));
  Param b("b", Tensor({0.05, -0.2}));
  const std::vector<double> rows = {0.3, 1.1, -2.0, 4.0, 0.25, 0.125};
  Graph batched;
  const auto both = batched.value(batched.affine(w, b, batched.input(Tensor(2, 3, rows))));
  for (std::size_t r = 0; r < 2; ++r) {
    Graph single;
    const auto one = single.value(single.affine(
        w, b, single.input(Tensor({rows[3 * r], rows[3 * r + 1], rows[3 * r + 2]}))));
    CHECK(one.row(0)[0] == both.row(r)[0]);
    CHECK(one.row(0)[1] == both.row(r)[1]);
  }
}

TEST_CASE("relu examples and subgradient") {
  Graph g;
  CHECK(g.value(g.relu(g.input(Tensor({-1.0}))))[0] == 0.0);
  CHECK(g.value(g.relu(g.input(Tensor({2.0}))))[0] == 2.0);
  CHECK(values(g.value(g.relu(g.input(Tensor({-3, 0, 5}))))) == std::vector<double>{0, 0, 5});

  // Gradient is zero wherever the output is zero, including exactly at 0.
  Param p("p", Tensor({-3, 0, 5}));
  Graph h;
  h.backward(h.sum(h.relu(h.param(p))));
  CHECK(values(*h.gradient(p)) == std::vector<double>{0, 0, 1});
}

TEST_CASE("concat examples") {
  Graph g;
  const NodeRef a = g.input(Tensor({1, 2}));
  const NodeRef b = g.input(Tensor({3}));
  const NodeRef ab[] = {a, b};
  CHECK(values(g.value(g.concat(ab))) == std::vector<double>{1, 2, 3});
  const NodeRef just_a[] = {a};
  CHECK(values(g.value(g.concat(just_a))) == std::vector<double>{1, 2});
  const NodeRef empty_then_one[] = {g.input(Tensor(std::vector<double>{})), g.input(Tensor({1}))};
  CHECK(values(g.value(g.concat(empty_then_one))) == std::vector<double>{1});
  CHECK_THROWS_AS(g.concat(std::span<const NodeRef>{}), UsageError);
}

TEST_CASE("concat and slice route adjoints back") {
  Param a("a", Tensor({1, 2}));
  Param b("b", Tensor({3}));
  Graph g;
  const NodeRef parts[] = {g.param(a), g.param(b)};
  const NodeRef cat = g.concat(parts);
  // loss = 2 * sum(cat) + sum(slice(cat, 1, 2)^2) = 2(a0+a1+b0) + a1^2 + b0^2
  const NodeRef terms[] = {g.scale(g.sum(cat), 2.0), g.sum(g.square(g.slice(cat, 1, 2)))};
  g.backward(g.sum(terms));
  CHECK(values(*g.gradient(a)) == std::vector<double>{2, 6});
  CHECK(values(*g.gradient(b)) == std::vector<double>{8});
}

TEST_CASE("backward examples") {
  Param w("w", Tensor({3.0}));
  Graph g;
  g.backward(g.sum(g.square(g.param(w))));
  CHECK((*g.gradient(w))[0] == 6.0);

  Param v("v", Tensor({1.0}));
  Graph h;
  h.backward(h.sum(h.relu(h.scale(h.param(v), -1.0))));
  CHECK((*h.gradient(v))[0] == 0.0);
}

TEST_CASE("backward needs a scalar root") {
  Graph g;
  const NodeRef x = g.input(Tensor({1, 2}));
  CHECK_THROWS_AS(g.backward(x), UsageError);
}

TEST_CASE("unbound parameters have no gradient") {
  Param w("w", Tensor({1.0}));
  Param unused("u", Tensor({1.0}));
  Graph g;
  g.backward(g.sum(g.param(w)));
  CHECK(g.gradient(unused) == nullptr);
  unused.grad()[0] = 5.0;
  g.accumulate_grad(unused);
  CHECK(unused.grad()[0] == 5.0);
}

TEST_CASE("shared subgraph adjoints equal the duplicated expression") {
  Param w("w", Tensor(3, 2, {0.5, -1.0, 0.25, 2.0, -0.75, 0.1}));
  Param b("b", Tensor({0.1, -0.2, 0.3}));
  Param v("v", Tensor(1, 3, {1.5, -0.5, 2.0}));
  Param c("c", Tensor({0.0}));
  const Tensor x({0.7, -1.3});

  // Shared: h feeds two consumers.
  Graph shared;
  const NodeRef h = shared.relu(shared.affine(w, b, shared.input(x)));
  const NodeRef s1[] = {shared.sum(shared.square(h)), shared.sum(shared.affine(v, c, h))};
  shared.backward(shared.sum(s1));

  // Duplicated: h computed twice.
  Graph dup;
  const NodeRef h1 = dup.relu(dup.affine(w, b, dup.input(x)));
  const NodeRef h2 = dup.relu(dup.affine(w, b, dup.input(x)));
  const NodeRef s2[] = {dup.sum(dup.square(h1)), dup.sum(dup.affine(v, c, h2))};
  dup.backward(dup.sum(s2));

  for (const Param* p : {&w, &b, &v}) {
    const auto a = values(*shared.gradient(*p));
    const auto d = values(*dup.gradient(*p));
    REQUIRE(a.size() == d.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i] - d[i]) <= 1e-12 * std::max(1.0, std::abs(d[i])));
    }
  }
}

TEST_CASE("accumulate_grad sums across graphs") {
  Param w("w", Tensor({2.0}));
  for (int i = 0; i < 3; ++i) {
    Graph g;
    g.backward(g.sum(g.square(g.param(w))));
    g.accumulate_grad(w);
  }
  CHECK(w.grad()[0] == 12.0);
}

TEST_CASE("forward and backward are deterministic") {
  Param w("w", Tensor(2, 2, {0.3, -0.1, 0.8, 0.5}));
  Param b("b", Tensor({0.01, 0.02}));
  auto run = [&] {
    Graph g;
    const NodeRef y = g.relu(g.affine(w, b, g.input(Tensor(3, 2, {1, 2, -1, 0.5, 3, -2}))));
    g.backward(g.sum(g.square(y)));
    return std::pair{values(g.value(y)), values(*g.gradient(w))};
  };
  CHECK(run() == run());
}

TEST_CASE("sgd examples") {
  Param w("w", Tensor({1.0}));
  w.grad()[0] = 2.0;
  Param* ps[] = {&w};
  sgd_step(ps, 0.1, 0.0);
  CHECK(w.value()[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(w.grad()[0] == 0.0);

  // Two steps with momentum 0.9 and constant gradient: the second update is
  // lr * (0.9 * g + g) = lr * 1.9 * g.
  Param m("m", Tensor({0.0}));
  Param* ms[] = {&m};
  const double lr = 0.01, g = 3.0;
  m.grad()[0] = g;
  sgd_step(ms, lr, 0.9);
  const double after_first = m.value()[0];
  m.grad()[0] = g;
  sgd_step(ms, lr, 0.9);
  CHECK(after_first - m.value()[0] == doctest::Approx(lr * 1.9 * g).epsilon(1e-12));

  Param z("z", Tensor({0.25, -4.0}));
  Param* zs[] = {&z};
  sgd_step(zs, 0.5, 0.9);
  CHECK(values(z.value()) == std::vector<double>{0.25, -4.0});
}

TEST_CASE("sgd rejects non-finite gradients before moving anything") {
  Param a("layer0/weight", Tensor({1.0}));
  Param b("layer1/weight", Tensor({1.0}));
  a.grad()[0] = 1.0;
  b.grad()[0] = NAN;
  Param* ps[] = {&a, &b};
  try {
    sgd_step(ps, 0.1, 0.0);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("layer1/weight") != std::string::npos);
  }
  CHECK(a.value()[0] == 1.0);
}

TEST_CASE("finite differences") {
  Param w("w", Tensor({3.0}));
  auto square = [&] { return w.value()[0] * w.value()[0]; };
  CHECK(std::abs(finite_difference_grad(square, w, 1e-5)[0] - 6.0) <= 1e-8);
  CHECK(w.value()[0] == 3.0);
  auto constant = [] { return 4.0; };
  CHECK(finite_difference_grad(constant, w, 1e-5)[0] == 0.0);
}

TEST_CASE("finite differences agree with backward on a two-layer MLP") {
  SplitMix64 rng(5);
  Tensor w1 = Tensor::zeros(4, 3), w2 = Tensor::zeros(2, 4);
  Tensor b1 = Tensor::zeros(4), b2 = Tensor::zeros(2);
  init_uniform_fan_in(w1, 3, rng);
  init_uniform_fan_in(b1, 3, rng);
  init_uniform_fan_in(w2, 4, rng);
  init_uniform_fan_in(b2, 4, rng);
  Param pw1("w1", w1), pb1("b1", b1), pw2("w2", w2), pb2("b2", b2);
  const Tensor x(2, 3, {0.5, -1.0, 2.0, 1.5, 0.25, -0.5});
  auto build = [&](Graph& g) {
    const NodeRef h = g.relu(g.affine(pw1, pb1, g.input(x)));
    return g.sum(g.square(g.affine(pw2, pb2, h)));
  };
  Graph g;
  g.backward(build(g));
  auto loss = [&] {
    Graph h;
    return h.scalar(build(h));
  };
  for (Param* p : {&pw1, &pb1, &pw2, &pb2}) {
    const Tensor fd = finite_difference_grad(loss, *p, 1e-5);
    const Tensor& an = *g.gradient(*p);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double denom = std::max({std::abs(fd[i]), std::abs(an[i]), 1e-5});
      CHECK(std::abs(fd[i] - an[i]) / denom <= 1e-5);
    }
  }
}

TEST_CASE("uniform fan-in initialization bounds and determinism") {
  SplitMix64 a(9), b(9);
  Tensor x = Tensor::zeros(16, 25), y = Tensor::zeros(16, 25);
  init_uniform_fan_in(x, 25, a);
  init_uniform_fan_in(y, 25, b);
  CHECK(x == y);
  for (double v : x.data()) CHECK(std::abs(v) <= 0.2);
}

TEST_CASE("param assign resets buffers on shape change") {
  Param p("p", Tensor({1, 2}));
  p.grad()[0] = 3.0;
  p.assign(Tensor({4, 5}));
  CHECK(p.grad()[0] == 3.0);
  p.assign(Tensor({1, 2, 3}));
  CHECK(p.grad().size() == 3);
  CHECK(p.momentum().size() == 3);
  CHECK(p.grad()[0] == 0.0);
}

}  // TEST_SUITE
