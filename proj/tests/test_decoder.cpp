#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "slfnet/decoder.hpp"
#include "slfnet/errors.hpp"

using namespace slfnet;

TEST_CASE("semantic probability graph") {
  const auto g0 = build_graph(0, 3);
  CHECK(g0.nodes.size() == 1);
  CHECK(g0.edges.empty());

  const auto g1 = build_graph(1, 3);
  CHECK(g1.nodes.size() == 4);
  CHECK(g1.edges.size() == 6);
  const std::size_t nlc = 0, a = g1.index_of(SlotKind::Action, 1), l = g1.index_of(SlotKind::Location, 1),
                    o = g1.index_of(SlotKind::Object, 1);
  CHECK(g1.parents(a) == std::vector<std::size_t>{nlc});
  CHECK(g1.parents(l) == std::vector<std::size_t>{nlc, a});
  auto po = g1.parents(o);
  std::sort(po.begin(), po.end());
  CHECK(po == std::vector<std::size_t>{nlc, a, l});
  CHECK(g1.acyclic());

  const auto g2 = build_graph(3, 3);
  CHECK(g2.acyclic());
  for (const auto& [from, to] : g2.edges) {
    CHECK(to != 0);
    if (from != 0) CHECK(g2.nodes[from].group == g2.nodes[to].group);
  }
  CHECK_THROWS_AS(build_graph(4, 3), DomainError);
}

TEST_CASE("span_from_distribution") {
  CHECK_FALSE(span_from_distribution(std::vector<double>{0, 0, 0, 1}, 0.5).has_value());
  CHECK(span_from_distribution(std::vector<double>{0, 0, 1, 0, 0}, 0.5) == Span{2, 2});
  CHECK(span_from_distribution(std::vector<double>{0.05, 0.40, 0.35, 0.05, 0.15}, 0.5) == Span{1, 2});
  // Extension never absorbs the sentinel.
  CHECK(span_from_distribution(std::vector<double>{0.1, 0.5, 0.4}, 0.5) == Span{1, 1});
  // Ties go to the lowest index.
  CHECK(span_from_distribution(std::vector<double>{0.3, 0.3, 0.1, 0.3}, 1.0) == Span{0, 1});
  CHECK_THROWS(span_from_distribution(std::vector<double>{1.0}, 0.5));
  CHECK_THROWS(span_from_distribution(std::vector<double>{0.5, 0.5}, 0.0));
}

TEST_CASE("render_slf") {
  const std::vector<std::string> tokens = {"turn", "on", "the", "light", "in", "the", "kitchen"};
  CHECK(render_slf({}, tokens).empty());
  CHECK(render_slf({{{0, 1}, Span{6, 6}, Span{3, 3}}}, tokens) ==
        R"(ALO(action_name_1="turn on", location_name_1="kitchen", object_name_1="light"))");
  CHECK(render_slf({{{0, 1}, std::nullopt, Span{3, 3}}, {{0, 0}, Span{5, 6}, std::nullopt}}, tokens) ==
        "ALO(action_name_1=\"turn on\", location_name_1=NIL, object_name_1=\"light\")\n"
        "ALO(action_name_2=\"turn\", location_name_2=\"the kitchen\", object_name_2=NIL)");
}

namespace {

// Rows of W1 other than `target` are zeroed; row `target` follows the sign of
// the tanh features so its logit is strictly largest.
void force_group_count(SlfModel& m, const NLCExample& ex, std::size_t target) {
  Tensor& w1 = m.params.value(m.count_head.W1);
  w1 = Tensor(w1.shape());
  Tape probe(&m.params);
  SentenceForward f(probe, m, ex.tokens, ex.dep_heads);
  Var z = ad::add(ad::add(ad::matmul(probe.param(m.count_head.W2), f.summary_action()),
                          ad::matmul(probe.param(m.count_head.W3), f.summary_location())),
                  ad::matmul(probe.param(m.count_head.W4), f.summary_object()));
  const Tensor hidden = ad::tanh(z).value();
  for (std::size_t j = 0; j < w1.cols(); ++j) w1.at(target, j) = hidden[j] >= 0 ? 5.0 : -5.0;
}

NLCExample three_commands() {
  NLCExample ex;
  ex.tokens = {"open", "the", "door", "and", "close", "the", "window", "then", "dim", "the", "lamp"};
  ex.dep_heads = {0, 2, 0, 0, 0, 6, 4, 4, 4, 10, 8};
  return ex;
}

}  // namespace

TEST_CASE("decode is deterministic and follows graph order") {
  const NLCExample ex = three_commands();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SlfModel m = testing::small_model({ex}, 8, seed);
    if (seed % 3 == 0) force_group_count(m, ex, 1 + seed % 9 / 3);
    const SlfParse a = decode(m, ex.tokens, ex.dep_heads);
    const SlfParse b = decode(m, ex.tokens, ex.dep_heads);
    CHECK(a.groups == b.groups);
    CHECK(a.trace.invocations.size() == b.trace.invocations.size());
    CHECK(a.k == a.groups.size());
    for (std::size_t g = 1; g < a.groups.size(); ++g) {
      CHECK(a.groups[g - 1].action.start < a.groups[g].action.start);
      CHECK_FALSE(a.groups[g - 1].action.overlaps(a.groups[g].action));
    }
    const auto& inv = a.trace.invocations;
    REQUIRE(!inv.empty());
    CHECK(inv[0].kind == SlotKind::Nlc);
    if (a.trace.predicted_k == 0) {
      CHECK(inv.size() == 1);
      continue;
    }
    REQUIRE(inv.size() == 2 + 2 * a.groups.size());
    CHECK(inv[1].kind == SlotKind::Action);
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
      CHECK(inv[2 + 2 * g].kind == SlotKind::Location);
      CHECK(inv[2 + 2 * g].group == g + 1);
      CHECK(inv[3 + 2 * g].kind == SlotKind::Object);
      CHECK(inv[3 + 2 * g].group == g + 1);
    }
  }
}

TEST_CASE("decode with k = 0 yields the empty parse") {
  const NLCExample ex = testing::kitchen_example();
  SlfModel m = testing::small_model({ex});
  Tensor& w1 = m.params.value(m.count_head.W1);
  w1 = Tensor(w1.shape());
  const SlfParse p = decode(m, ex.tokens, ex.dep_heads);
  CHECK(p.trace.predicted_k == 0);
  CHECK(p.groups.empty());
  CHECK(render_slf(p.groups, ex.tokens).empty());
}

TEST_CASE("each group's pointers depend only on its own action") {
  const NLCExample ex = three_commands();
  SlfModel m = testing::small_model({ex}, 8, 4);
  force_group_count(m, ex, 3);
  const SlfParse p = decode(m, ex.tokens, ex.dep_heads);
  REQUIRE(p.trace.predicted_k == 3);
  REQUIRE(p.groups.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) {
    // Fresh forward that scores this group alone.
    Tape t(&m.params);
    SentenceForward fwd(t, m, ex.tokens, ex.dep_heads);
    const SlfGroup& grp = p.groups[g];
    Var ea = fwd.slot_embedding(grp.action);
    const Tensor loc = ad::softmax(fwd.location_logits(ea)).value();
    CHECK(std::vector<double>(loc.data().begin(), loc.data().end()) == p.trace.invocations[2 + 2 * g].distribution);
    Var el = grp.location ? fwd.slot_embedding(*grp.location) : fwd.empty_location_embedding();
    const Tensor obj = ad::softmax(fwd.object_logits(ea, el)).value();
    CHECK(std::vector<double>(obj.data().begin(), obj.data().end()) == p.trace.invocations[3 + 2 * g].distribution);
  }
}

TEST_CASE("too few non-overlapping actions produce a warning") {
  NLCExample ex;
  ex.tokens = {"stop"};
  ex.dep_heads = {0};
  SlfModel m = testing::small_model({ex}, 8, 2);
  force_group_count(m, ex, 2);
  const SlfParse p = decode(m, ex.tokens, ex.dep_heads);
  CHECK(p.trace.predicted_k == 2);
  CHECK(p.groups.size() == 1);
  CHECK(p.trace.warnings.size() == 1);
}
