#include "slfnet/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "slfnet/errors.hpp"
#include "slfnet/rng.hpp"

namespace slfnet {

GrammarConfig GrammarConfig::defaults() {
  GrammarConfig c;
  c.actions = {"turn on", "turn off", "open",  "close", "clean",    "check", "lock",
               "unlock",  "dim",      "start", "stop",  "water",    "heat",  "cool"};
  c.objects = {"light",  "door", "window", "fan",  "heater",         "curtains",    "tv",
               "oven",   "lamp", "floor",  "plants", "air conditioner", "washing machine",
               "coffee maker", "speaker"};
  c.locations = {"kitchen", "bedroom", "living room", "bathroom", "garage",
                 "office",  "hallway", "garden",      "dining room", "basement"};
  c.connectors = {"and", "then", "and then", "after that"};
  c.k_weights = {0.4, 0.35, 0.25};
  return c;
}

void GrammarConfig::validate() const {
  if (actions.empty()) throw DomainError("grammar: actions must not be empty");
  if (objects.empty()) throw DomainError("grammar: objects must not be empty");
  if (locations.empty()) throw DomainError("grammar: locations must not be empty");
  if (connectors.empty()) throw DomainError("grammar: connectors must not be empty");
  if (k_weights.empty()) throw DomainError("grammar: k_weights must not be empty");
  double total = 0.0;
  for (double w : k_weights) {
    if (!(w >= 0.0)) throw DomainError("grammar: k_weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("grammar: k_weights must have a positive sum");
  for (double p : {p_omit_location, p_omit_object})
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("grammar: omission probabilities must lie in [0, 1]");
  for (const auto* list : {&actions, &objects, &locations, &connectors})
    for (const auto& phrase : *list)
      if (phrase.find_first_not_of(' ') == std::string::npos)
        throw DomainError("grammar: phrases must contain at least one word");
}

namespace {

std::vector<std::string> words(const std::string& phrase) {
  std::istringstream ss(phrase);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

std::size_t draw_k(const std::vector<double>& weights, Xorshift64Star& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u < acc) return i + 1;
  }
  return last_positive + 1;
}

class SentenceBuilder {
 public:
  std::size_t append(const std::vector<std::string>& ws, std::size_t head_of_first) {
    const std::size_t first = tokens.size();
    for (const auto& w : ws) {
      tokens.push_back(w);
      heads.push_back(head_of_first);
    }
    return first;
  }
  std::vector<std::string> tokens;
  std::vector<std::size_t> heads;
};

}  // namespace

std::vector<NLCExample> generate_synthetic(const GrammarConfig& config, std::size_t n) {
  config.validate();
  if (n == 0) throw DomainError("generate_synthetic needs n >= 1");
  Xorshift64Star rng(config.seed);
  std::vector<NLCExample> out;
  out.reserve(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t k = draw_k(config.k_weights, rng);
    std::vector<std::size_t> pool(config.actions.size());
    std::iota(pool.begin(), pool.end(), 0);

    SentenceBuilder sb;
    NLCExample ex;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", idx + 1);
    ex.id = id;
    std::size_t prev_action_head = 0;
    for (std::size_t g = 0; g < k; ++g) {
      if (g > 0) {
        const auto conn = words(config.connectors[rng.below(config.connectors.size())]);
        sb.append(conn, prev_action_head);
      }
      if (pool.empty()) {
        pool.resize(config.actions.size());
        std::iota(pool.begin(), pool.end(), 0);
      }
      const std::size_t pick = rng.below(pool.size());
      const auto action_words = words(config.actions[pool[pick]]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

      const std::size_t a = sb.tokens.size();
      sb.append(action_words, a);
      if (g == 0) sb.heads[a] = a; else sb.heads[a] = prev_action_head;
      SlfGroup group{{a, a + action_words.size() - 1}, std::nullopt, std::nullopt};

      const bool omit_object = rng.bernoulli(config.p_omit_object);
      const bool omit_location = rng.bernoulli(config.p_omit_location);
      if (!omit_object) {
        const auto obj = words(config.objects[rng.below(config.objects.size())]);
        const std::size_t det = sb.tokens.size();
        const std::size_t head = det + obj.size();
        sb.append({"the"}, head);
        const std::size_t start = sb.append(obj, head);
        sb.heads[head] = a;
        group.object = Span{start, head};
      }
      if (!omit_location) {
        const auto loc = words(config.locations[rng.below(config.locations.size())]);
        const std::size_t prep = sb.tokens.size();
        const std::size_t head = prep + 1 + loc.size();
        sb.append({"in", "the"}, head);
        const std::size_t start = sb.append(loc, head);
        sb.heads[head] = a;
        group.location = Span{start, head};
      }
      ex.groups.push_back(group);
      prev_action_head = a;
    }
    ex.tokens = std::move(sb.tokens);
    ex.dep_heads = std::move(sb.heads);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace slfnet
