#include "slfnet/metrics.hpp"

#include <exception>
#include <map>
#include <tuple>

#include "slfnet/decoder.hpp"
#include "slfnet/errors.hpp"

namespace slfnet {
namespace {

using Triple = std::tuple<std::string, std::string, std::string>;
using SlotValue = std::pair<int, Span>;

std::string opt_text(const std::vector<std::string>& tokens, const OptSpan& s) {
  return s ? span_text(tokens, *s) : std::string("\x01NIL");
}

std::map<Triple, std::size_t> triples(const std::vector<SlfGroup>& groups,
                                      const std::vector<std::string>& tokens) {
  std::map<Triple, std::size_t> m;
  for (const auto& g : groups)
    ++m[{span_text(tokens, g.action), opt_text(tokens, g.location), opt_text(tokens, g.object)}];
  return m;
}

std::map<SlotValue, std::size_t> slot_values(const std::vector<SlfGroup>& groups) {
  std::map<SlotValue, std::size_t> m;
  for (const auto& g : groups) {
    ++m[{0, g.action}];
    if (g.location) ++m[{1, *g.location}];
    if (g.object) ++m[{2, *g.object}];
  }
  return m;
}

}  // namespace

ExampleScore score_example(const std::vector<SlfGroup>& predicted, const std::vector<SlfGroup>& gold,
                           const std::vector<std::string>& tokens) {
  ExampleScore s;
  s.exact = triples(predicted, tokens) == triples(gold, tokens);
  const auto p = slot_values(predicted);
  const auto g = slot_values(gold);
  for (const auto& [value, count] : p) {
    s.predicted += count;
    auto it = g.find(value);
    if (it != g.end()) s.correct += std::min(count, it->second);
  }
  for (const auto& [value, count] : g) s.gold += count;
  return s;
}

MetricsReport summarize(const std::vector<ExampleScore>& scores) {
  MetricsReport r;
  for (const auto& s : scores) {
    r.T += 1;
    r.C += s.exact ? 1 : 0;
    r.L_correct += s.correct;
    r.P_pred += s.predicted;
    r.R_gold += s.gold;
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  r.accuracy = ratio(r.C, r.T);
  r.precision = ratio(r.L_correct, r.P_pred);
  r.recall = ratio(r.L_correct, r.R_gold);
  const double pr = r.precision + r.recall;
  r.f_score = pr == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / pr;
  return r;
}

MetricsReport score_parses(const std::vector<std::vector<SlfGroup>>& predicted,
                           const std::vector<NLCExample>& examples) {
  if (predicted.size() != examples.size())
    throw ContractError("score_parses: " + std::to_string(predicted.size()) + " predictions for " +
                        std::to_string(examples.size()) + " examples");
  std::vector<ExampleScore> scores;
  scores.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i)
    scores.push_back(score_example(predicted[i], examples[i].groups, examples[i].tokens));
  return summarize(scores);
}

MetricsReport evaluate(const SlfModel& model, const std::vector<NLCExample>& examples,
                       kernels::Exec exec) {
  std::vector<ExampleScore> scores(examples.size());
  auto score_one = [&](std::size_t i) {
    const auto& ex = examples[i];
    const SlfParse parse = decode(model, ex.tokens, ex.dep_heads);
    scores[i] = score_example(parse.groups, ex.groups, ex.tokens);
  };
  if (exec == kernels::Exec::Parallel) {
    std::exception_ptr error;
    const auto n = static_cast<long long>(examples.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
      try {
        score_one(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(slfnet_evaluate_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t i = 0; i < examples.size(); ++i) score_one(i);
  }
  return summarize(scores);
}

}  // namespace slfnet
