#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "slfnet/errors.hpp"
#include "slfnet/grad_check.hpp"
#include "slfnet/tape.hpp"

using namespace slfnet;
using testing::random_tensor;

namespace {

Tensor triple_loop(const Tensor& a, const Tensor& b) {
  Tensor c(Shape{a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a.at(i, p) * b.at(p, j);
      c.at(i, j) = s;
    }
  return c;
}

}  // namespace

TEST_CASE("matmul identity and zero cases") {
  Tape t;
  Var eye = t.constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  Var m = t.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
  CHECK(ad::matmul(eye, m).value() == Tensor::matrix(2, 2, {1, 2, 3, 4}));
  Var zero = t.constant(Tensor::matrix(2, 1, {0, 0}));
  CHECK(ad::matmul(m, zero).value() == Tensor::matrix(2, 1, {0, 0}));
}

TEST_CASE("matmul equals the triple-loop oracle") {
  Tape t;
  const Tensor a = random_tensor(Shape{3, 4}, 1), b = random_tensor(Shape{4, 2}, 2);
  CHECK(bit_identical(ad::matmul(t.constant(a), t.constant(b)).value(), triple_loop(a, b)));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor x = testing::integer_tensor(Shape{5, 7}, seed), y = testing::integer_tensor(Shape{7, 3}, seed + 99);
    CHECK(ad::matmul(t.constant(x), t.constant(y)).value() == triple_loop(x, y));
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape t;
  Var a = t.constant(Tensor(Shape{2, 3})), b = t.constant(Tensor(Shape{2, 2}));
  try {
    ad::matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[2x2]") != std::string::npos);
  }
}

TEST_CASE("softmax examples") {
  Tape t;
  const Tensor u = ad::softmax(t.constant(Tensor::vector({0, 0, 0}))).value();
  for (double v : u.data()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const Tensor big = ad::softmax(t.constant(Tensor::vector({1000, 0}))).value();
  CHECK(big.all_finite());
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] < 1e-300);

  const Tensor s = ad::softmax(t.constant(Tensor::vector({1, 2, 3}))).value();
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  const double oracle[3] = {std::exp(1.0) / z, std::exp(2.0) / z, std::exp(3.0) / z};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(s[i] - oracle[i]) <= 1e-15);

  CHECK_THROWS_AS(ad::softmax(t.constant(Tensor(Shape{0}))), DomainError);
}

TEST_CASE("softmax sums to one and is permutation-equivariant") {
  Xorshift64Star rng(11);
  for (int c = 0; c < 1000; ++c) {
    Tape t;
    const std::size_t n = 1 + rng.below(12);
    const Tensor v = uniform_tensor(Shape{n}, 1.0 + 30.0 * rng.uniform(), rng);
    const Tensor s = ad::softmax(t.constant(v)).value();
    CHECK(std::abs(std::accumulate(s.data().begin(), s.data().end(), 0.0) - 1.0) <= 1e-12);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Tensor pv(Shape{n});
    for (std::size_t i = 0; i < n; ++i) pv[i] = v[perm[i]];
    const Tensor ps = ad::softmax(t.constant(pv)).value();
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ps[i] - s[perm[i]]) <= 1e-15);
  }
}

TEST_CASE("elementwise maps and concat order") {
  Tape t;
  CHECK(ad::sigmoid(t.constant(Tensor::scalar(0))).value().item() == 0.5);
  CHECK(ad::tanh(t.constant(Tensor::scalar(0))).value().item() == 0.0);
  Var a = t.constant(Tensor::vector({1, 2})), b = t.constant(Tensor::vector({3, 4, 5}));
  CHECK(ad::concat({a, b}, 0).value() == Tensor::vector({1, 2, 3, 4, 5}));
  CHECK_THROWS_AS(ad::concat({t.constant(Tensor(Shape{2, 2})), t.constant(Tensor(Shape{3, 3}))}, 1),
                  DimensionError);
  CHECK(ad::log_sigmoid(t.constant(Tensor::scalar(-800))).value().item() == doctest::Approx(-800.0));
}

TEST_CASE("backward basics") {
  ParamStore ps;
  const ParamId p = ps.add("p", random_tensor(Shape{3, 2}, 4));
  const ParamId q = ps.add("q", random_tensor(Shape{2}, 5));

  SUBCASE("sum gives all-ones") {
    Tape t(&ps);
    const Gradients g = t.backward(ad::sum(t.param(p)));
    CHECK(g[p] == Tensor(Shape{3, 2}, 1.0));
    CHECK(g[q] == Tensor(Shape{2}, 0.0));
  }
  SUBCASE("constant loss gives zeros") {
    Tape t(&ps);
    t.param(p);
    const Gradients g = t.backward(t.constant(Tensor::scalar(2.0)));
    CHECK(g[p] == Tensor(Shape{3, 2}, 0.0));
  }
  SUBCASE("non-scalar loss is a contract error") {
    Tape t(&ps);
    CHECK_THROWS_AS(t.backward(t.param(q)), ContractError);
  }
}

TEST_CASE("sigmoid(w.x) matches central differences") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParamStore ps;
    const ParamId w = ps.add("w", random_tensor(Shape{1, 6}, seed));
    const Tensor x = random_tensor(Shape{6}, seed + 100);
    GradCheckOptions opt;
    opt.tolerance = 1e-6;
    const auto report = grad_check(ps, [&](Tape& t) {
      return ad::sum(ad::sigmoid(ad::matmul(t.param(w), t.constant(x))));
    }, opt);
    CHECK(report.passed());
  }
}

TEST_CASE("grad_check contract") {
  ParamStore ps;
  const ParamId p = ps.add("p", random_tensor(Shape{4}, 9));
  const Tensor before = ps.value(p);

  auto quad = grad_check(ps, [&](Tape& t) { Var v = t.param(p); return ad::sum(ad::mul(v, v)); });
  REQUIRE(quad.params.size() == 1);
  CHECK(quad.params[0].max_rel_error <= 1e-8);
  CHECK(bit_identical(ps.value(p), before));

  auto flat = grad_check(ps, [&](Tape& t) { t.param(p); return t.constant(Tensor::scalar(1.0)); });
  CHECK(flat.params[0].max_rel_error == 0.0);
  CHECK(flat.params[0].analytic == 0.0);
  CHECK(flat.params[0].numeric == 0.0);

  GradCheckOptions zero_step;
  zero_step.step = 0.0;
  CHECK_THROWS_AS(grad_check(ps, [&](Tape& t) { return ad::sum(t.param(p)); }, zero_step), ContractError);
  int calls = 0;
  CHECK_THROWS_AS(grad_check(ps, [&](Tape& t) {
    return ad::scale(ad::sum(t.param(p)), 1.0 + 1e-3 * ++calls);
  }), ContractError);

  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(0.0, 1e-9) == doctest::Approx(0.1));
  CHECK(relative_error(2.0, 1.0) == 0.5);
}

TEST_CASE("fault injection is detected") {
  ParamStore ps;
  const ParamId p = ps.add("p", random_tensor(Shape{3}, 1));
  GradCheckOptions opt;
  opt.analytic_hook = [&](Gradients& g) { g[p][1] += 1e-2; };
  const auto report = grad_check(ps, [&](Tape& t) { return ad::sum(ad::tanh(t.param(p))); }, opt);
  CHECK_FALSE(report.passed());
  CHECK(report.worst()->worst_index == 1);
}

// Every differentiable op against central differences, loss = sum(op(x) * r).
TEST_CASE("op gradients over 100 seeds") {
  using Builder = std::function<Var(Tape&, std::vector<Var>&)>;
  struct OpCase {
    const char* name;
    std::vector<Shape> inputs;
    Builder build;
  };
  const std::vector<std::size_t> ids = {2, 0, 2, 1};
  const std::vector<std::size_t> pick = {1, 1, 3};
  const std::vector<OpCase> cases = {
      {"matmul", {Shape{3, 4}, Shape{4, 2}}, [](Tape&, auto& v) { return ad::matmul(v[0], v[1]); }},
      {"matvec", {Shape{3, 4}, Shape{4}}, [](Tape&, auto& v) { return ad::matmul(v[0], v[1]); }},
      {"add", {Shape{3, 2}, Shape{3, 2}}, [](Tape&, auto& v) { return ad::add(v[0], v[1]); }},
      {"sub", {Shape{5}, Shape{5}}, [](Tape&, auto& v) { return ad::sub(v[0], v[1]); }},
      {"mul", {Shape{2, 3}, Shape{2, 3}}, [](Tape&, auto& v) { return ad::mul(v[0], v[1]); }},
      {"scale", {Shape{4}}, [](Tape&, auto& v) { return ad::scale(v[0], -1.7); }},
      {"sigmoid", {Shape{5}}, [](Tape&, auto& v) { return ad::sigmoid(v[0]); }},
      {"tanh", {Shape{2, 2}}, [](Tape&, auto& v) { return ad::tanh(v[0]); }},
      {"log_sigmoid", {Shape{5}}, [](Tape&, auto& v) { return ad::log_sigmoid(v[0]); }},
      {"softmax", {Shape{6}}, [](Tape&, auto& v) { return ad::softmax(v[0]); }},
      {"log_softmax", {Shape{6}}, [](Tape&, auto& v) { return ad::log_softmax(v[0]); }},
      {"concat0", {Shape{2}, Shape{3}}, [](Tape&, auto& v) { return ad::concat({v[0], v[1]}, 0); }},
      {"concat_rows", {Shape{2, 3}, Shape{1, 3}}, [](Tape&, auto& v) { return ad::concat({v[0], v[1]}, 0); }},
      {"concat_cols", {Shape{2, 3}, Shape{2, 1}}, [](Tape&, auto& v) { return ad::concat({v[0], v[1]}, 1); }},
      {"stack_columns", {Shape{3}, Shape{3}}, [](Tape&, auto& v) {
         return ad::stack_columns(std::span<const Var>(v.data(), 2));
       }},
      {"column", {Shape{3, 4}}, [](Tape&, auto& v) { return ad::column(v[0], 2); }},
      {"slice_columns", {Shape{3, 4}}, [](Tape&, auto& v) { return ad::slice_columns(v[0], 1, 2); }},
      {"select_columns", {Shape{2, 4}}, [&](Tape&, auto& v) { return ad::select_columns(v[0], pick); }},
      {"slice", {Shape{6}}, [](Tape&, auto& v) { return ad::slice(v[0], 2, 3); }},
      {"transpose", {Shape{2, 3}}, [](Tape&, auto& v) { return ad::transpose(v[0]); }},
      {"reshape", {Shape{2, 3}}, [](Tape&, auto& v) { return ad::reshape(v[0], Shape{6}); }},
      {"sum", {Shape{2, 3}}, [](Tape&, auto& v) { return ad::sum(v[0]); }},
      {"add_to_columns", {Shape{3, 4}, Shape{3}}, [](Tape&, auto& v) { return ad::add_to_columns(v[0], v[1]); }},
      {"lookup_columns", {Shape{3, 2}}, [&](Tape&, auto& v) { return ad::lookup_columns(v[0], ids); }},
      {"lstm_cell", {Shape{12}, Shape{6}}, [](Tape&, auto& v) { return ad::lstm_cell(v[0], v[1]); }},
  };
  for (const auto& oc : cases) {
    CAPTURE(oc.name);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      ParamStore ps;
      std::vector<ParamId> pids;
      for (std::size_t i = 0; i < oc.inputs.size(); ++i)
        pids.push_back(ps.add("x" + std::to_string(i), random_tensor(oc.inputs[i], seed * 31 + i, 2.0)));
      Tensor weights;
      auto loss = [&](Tape& t) {
        std::vector<Var> vars;
        for (ParamId id : pids) vars.push_back(t.param(id));
        Var out = oc.build(t, vars);
        if (weights.shape() != out.shape()) weights = random_tensor(out.shape(), seed + 7777);
        return ad::sum(ad::mul(out, t.constant(weights)));
      };
      const auto report = grad_check(ps, loss);
      if (!report.passed()) {
        CAPTURE(seed);
        CHECK(report.worst()->max_rel_error <= 1e-4);
      }
    }
  }
}

TEST_CASE("tape is topological and backward visits each reachable op once") {
  ParamStore ps;
  const ParamId w = ps.add("w", random_tensor(Shape{3, 3}, 1));
  Tape t(&ps);
  Var x = t.constant(random_tensor(Shape{3}, 2));
  Var h = ad::tanh(ad::matmul(t.param(w), x));
  Var unused = ad::sigmoid(h);
  (void)unused;
  Var loss = ad::sum(ad::mul(h, h));
  for (NodeId n = 0; n < t.size(); ++n)
    for (NodeId in : t.inputs(n)) CHECK(in < n);

  std::set<NodeId> reachable;
  std::vector<NodeId> stack = {loss.id()};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (!reachable.insert(n).second) continue;
    for (NodeId in : t.inputs(n)) stack.push_back(in);
  }
  std::size_t interior = 0;
  for (NodeId n : reachable) interior += t.op(n) != OpKind::Constant && t.op(n) != OpKind::Parameter;
  t.backward(loss);
  CHECK(interior == 4);  // sum, mul, tanh, matmul
  CHECK(t.last_backward_visits() == interior);
}
