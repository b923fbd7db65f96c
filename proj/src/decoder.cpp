#include "slfnet/decoder.hpp"

#include <algorithm>
#include <numeric>

#include "slfnet/errors.hpp"
#include "slfnet/heads.hpp"

namespace slfnet {

const char* slot_kind_name(SlotKind kind) noexcept {
  switch (kind) {
    case SlotKind::Nlc: return "count";
    case SlotKind::Action: return "action";
    case SlotKind::Location: return "location";
    case SlotKind::Object: return "object";
  }
  return "?";
}

std::size_t SemanticProbGraph::index_of(SlotKind kind, std::size_t group) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == kind && nodes[i].group == group) return i;
  throw DomainError(std::string("graph has no ") + slot_kind_name(kind) + " node for group " +
                    std::to_string(group));
}

std::vector<std::size_t> SemanticProbGraph::parents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (const auto& [from, to] : edges)
    if (to == node) out.push_back(from);
  return out;
}

bool SemanticProbGraph::acyclic() const {
  std::vector<std::size_t> indegree(nodes.size(), 0);
  for (const auto& e : edges) ++indegree[e.second];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t n = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& [from, to] : edges)
      if (from == n && --indegree[to] == 0) ready.push_back(to);
  }
  return seen == nodes.size();
}

SemanticProbGraph build_graph(std::size_t k, std::size_t k_max) {
  if (k > k_max)
    throw DomainError("group count " + std::to_string(k) + " exceeds k_max " + std::to_string(k_max));
  SemanticProbGraph g;
  g.nodes.push_back({SlotKind::Nlc, 0});
  for (std::size_t grp = 1; grp <= k; ++grp) {
    const std::size_t a = g.nodes.size();
    g.nodes.push_back({SlotKind::Action, grp});
    g.nodes.push_back({SlotKind::Location, grp});
    g.nodes.push_back({SlotKind::Object, grp});
    const std::size_t l = a + 1, o = a + 2;
    g.edges.insert(g.edges.end(), {{0, a}, {0, l}, {0, o}, {a, l}, {a, o}, {l, o}});
  }
  return g;
}

OptSpan span_from_distribution(std::span<const double> probs, double beta) {
  if (probs.size() < 2) throw DomainError("pointer distribution needs L >= 1 positions plus sentinel");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  const std::size_t len = probs.size() - 1;
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  if (best == len) return std::nullopt;
  const double floor = beta * probs[best];
  Span s{best, best};
  while (s.start > 0 && probs[s.start - 1] >= floor) --s.start;
  while (s.end + 1 < len && probs[s.end + 1] >= floor) ++s.end;
  return s;
}

namespace {

std::vector<double> to_vector(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

SlfParse decode(const SlfModel& model, const std::vector<std::string>& tokens,
                std::span<const std::size_t> heads) {
  Tape tape(&model.params);
  SentenceForward fwd(tape, model, tokens, heads);
  SlfParse parse;
  DecodeTrace& trace = parse.trace;
  for (const Var& w : fwd.type_attention_weights()) trace.type_attention.push_back(to_vector(w.value()));

  GroupCountOutput count = fwd.group_count();
  trace.predicted_k = count.k;
  trace.invocations.push_back({SlotKind::Nlc, 0, to_vector(count.probs.value())});
  if (count.k == 0) return parse;

  const auto candidates = enumerate_action_candidates(tokens.size(), model.config.max_span);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const Span& c : candidates) {
    const double p = ad::sigmoid(fwd.action_logit(c)).value()[0];
    scores.push_back(p);
    trace.action_scores.emplace_back(c, p);
  }
  trace.invocations.push_back({SlotKind::Action, 0, scores});

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<Span> actions;
  for (std::size_t idx : order) {
    if (actions.size() == count.k) break;
    const Span& c = candidates[idx];
    if (std::none_of(actions.begin(), actions.end(), [&](const Span& s) { return s.overlaps(c); }))
      actions.push_back(c);
  }
  if (actions.size() < count.k)
    trace.warnings.push_back("only " + std::to_string(actions.size()) +
                             " non-overlapping action candidates for k=" + std::to_string(count.k));
  std::sort(actions.begin(), actions.end());

  for (std::size_t g = 0; g < actions.size(); ++g) {
    SlfGroup group{actions[g], std::nullopt, std::nullopt};
    Var ea = fwd.slot_embedding(group.action);

    Var loc = ad::softmax(fwd.location_logits(ea));
    trace.invocations.push_back({SlotKind::Location, g + 1, to_vector(loc.value())});
    group.location = span_from_distribution(loc.value().data(), model.config.beta);

    Var el = group.location ? fwd.slot_embedding(*group.location) : fwd.empty_location_embedding();
    Var obj = ad::softmax(fwd.object_logits(ea, el));
    trace.invocations.push_back({SlotKind::Object, g + 1, to_vector(obj.value())});
    group.object = span_from_distribution(obj.value().data(), model.config.beta);

    parse.groups.push_back(group);
  }
  parse.k = parse.groups.size();
  return parse;
}

std::string render_slf(const std::vector<SlfGroup>& groups, const std::vector<std::string>& tokens) {
  auto slot = [&](const OptSpan& s) -> std::string {
    return s ? "\"" + span_text(tokens, *s) + "\"" : std::string("NIL");
  };
  std::string out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string n = std::to_string(g + 1);
    if (g) out += '\n';
    out += "ALO(action_name_" + n + "=\"" + span_text(tokens, groups[g].action) + "\", location_name_" +
           n + "=" + slot(groups[g].location) + ", object_name_" + n + "=" + slot(groups[g].object) +
           ")";
  }
  return out;
}

}  // namespace slfnet
