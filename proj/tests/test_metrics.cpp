#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "slfnet/errors.hpp"
#include "slfnet/metrics.hpp"
#include "slfnet/synth.hpp"

using namespace slfnet;

namespace {

struct Counts {
  bool exact;
  std::size_t correct, predicted, gold;
};

std::vector<std::string> triple(const SlfGroup& g, const std::vector<std::string>& tokens) {
  return {span_text(tokens, g.action), g.location ? span_text(tokens, *g.location) : "<nil>",
          g.object ? span_text(tokens, *g.object) : "<nil>"};
}

// Exact match by trying every pairing of predicted and gold groups; slot
// values matched one at a time against unused gold values.
Counts brute_force(const std::vector<SlfGroup>& pred, const std::vector<SlfGroup>& gold,
                   const std::vector<std::string>& tokens) {
  Counts c{false, 0, 0, 0};
  if (pred.size() == gold.size()) {
    std::vector<std::size_t> perm(pred.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    do {
      bool all = true;
      for (std::size_t i = 0; i < perm.size(); ++i) all = all && triple(pred[i], tokens) == triple(gold[perm[i]], tokens);
      c.exact = c.exact || all;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  auto values = [](const std::vector<SlfGroup>& gs) {
    std::vector<std::pair<int, Span>> v;
    for (const auto& g : gs) {
      v.emplace_back(0, g.action);
      if (g.location) v.emplace_back(1, *g.location);
      if (g.object) v.emplace_back(2, *g.object);
    }
    return v;
  };
  const auto pv = values(pred);
  const auto gv = values(gold);
  c.predicted = pv.size();
  c.gold = gv.size();
  std::vector<bool> used(gv.size(), false);
  for (const auto& p : pv)
    for (std::size_t j = 0; j < gv.size(); ++j)
      if (!used[j] && gv[j] == p) {
        used[j] = true;
        ++c.correct;
        break;
      }
  return c;
}

std::vector<SlfGroup> perturb(std::vector<SlfGroup> groups, std::size_t n_tokens, Xorshift64Star& rng) {
  for (auto& g : groups) {
    if (rng.bernoulli(0.2)) g.location.reset();
    if (rng.bernoulli(0.2)) g.object.reset();
    if (rng.bernoulli(0.2)) {
      const std::size_t s = rng.below(n_tokens);
      g.object = Span{s, s};
    }
  }
  if (!groups.empty() && rng.bernoulli(0.2)) groups.pop_back();
  rng.shuffle(groups);
  return groups;
}

}  // namespace

TEST_CASE("per-example counts match a brute-force oracle") {
  const auto corpus = generate_synthetic(GrammarConfig::defaults(), 400);
  Xorshift64Star rng(17);
  for (const auto& ex : corpus) {
    const auto pred = perturb(ex.groups, ex.tokens.size(), rng);
    const ExampleScore s = score_example(pred, ex.groups, ex.tokens);
    const Counts c = brute_force(pred, ex.groups, ex.tokens);
    CHECK(s.exact == c.exact);
    CHECK(s.correct == c.correct);
    CHECK(s.predicted == c.predicted);
    CHECK(s.gold == c.gold);
  }
}

TEST_CASE("group order does not change the score") {
  const auto corpus = generate_synthetic(GrammarConfig::defaults(), 100);
  Xorshift64Star rng(3);
  for (const auto& ex : corpus) {
    auto shuffled = ex.groups;
    rng.shuffle(shuffled);
    const ExampleScore s = score_example(shuffled, ex.groups, ex.tokens);
    CHECK(s.exact);
    CHECK(s.correct == s.gold);
  }
}

TEST_CASE("identical text at different positions is an exact match but not a correct slot") {
  const std::vector<std::string> tokens = {"open", "the", "door", "and", "open", "the", "door"};
  const std::vector<SlfGroup> gold = {{{0, 0}, std::nullopt, Span{2, 2}}};
  const std::vector<SlfGroup> pred = {{{4, 4}, std::nullopt, Span{6, 6}}};
  const ExampleScore s = score_example(pred, gold, tokens);
  CHECK(s.exact);
  CHECK(s.correct == 0);
  CHECK(s.predicted == 2);
  CHECK(s.gold == 2);
}

TEST_CASE("summaries and zero denominators") {
  const MetricsReport empty = summarize({});
  CHECK(empty.accuracy == 0.0);
  CHECK(empty.precision == 0.0);
  CHECK(empty.f_score == 0.0);

  const MetricsReport r = summarize({{true, 3, 3, 3}, {false, 1, 2, 4}, {false, 0, 0, 2}});
  CHECK(r.C == 1);
  CHECK(r.T == 3);
  CHECK(r.L_correct == 4);
  CHECK(r.P_pred == 5);
  CHECK(r.R_gold == 9);
  CHECK(r.accuracy == 1.0 / 3);
  CHECK(r.precision == 4.0 / 5);
  CHECK(r.recall == 4.0 / 9);
  CHECK(std::abs(r.f_score - 2 * (0.8 * 4.0 / 9) / (0.8 + 4.0 / 9)) <= 1e-15);
}

TEST_CASE("an always-empty predictor") {
  const auto corpus = generate_synthetic(GrammarConfig::defaults(), 50);
  const MetricsReport r = score_parses(std::vector<std::vector<SlfGroup>>(50), corpus);
  CHECK(r.accuracy == 0.0);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f_score == 0.0);
  CHECK(r.R_gold > 0);
  CHECK_THROWS_AS(score_parses(std::vector<std::vector<SlfGroup>>(49), corpus), ContractError);
}

TEST_CASE("parallel and serial evaluation agree") {
  const auto corpus = generate_synthetic(GrammarConfig::defaults(), 40);
  const SlfModel m = testing::small_model(corpus, 8, 6);
  const MetricsReport a = evaluate(m, corpus, kernels::Exec::Parallel);
  const MetricsReport b = evaluate(m, corpus, kernels::Exec::Serial);
  CHECK(a.C == b.C);
  CHECK(a.L_correct == b.L_correct);
  CHECK(a.P_pred == b.P_pred);
  CHECK(a.f_score == b.f_score);
}
