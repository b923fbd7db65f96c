#include "slfnet/config.hpp"

#include <fstream>
#include <sstream>

#include "slfnet/errors.hpp"

namespace slfnet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw DataError("config: '" + where + "' must be an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw DataError("config: unknown key '" + where + "." + item.key() + "'");
  }
}

std::size_t get_size(const json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned())
    throw DataError("config: '" + where + "." + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double get_double(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw DataError("config: '" + where + "." + key + "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback,
                       const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw DataError("config: '" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const char* key,
                                     const std::vector<std::string>& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array()) throw DataError("config: '" + where + "." + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw DataError("config: '" + where + "." + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

const char* interaction_mode_name(InteractionMode mode) noexcept {
  return mode == InteractionMode::Learned ? "learned" : "passthrough";
}

const char* attention_mode_name(AttentionMode mode) noexcept {
  return mode == AttentionMode::Learned ? "learned" : "zero_query";
}

TrainConfig train_config_from_json(const json& j) {
  const std::string w = "train";
  require_object(j, w);
  reject_unknown(j, {"d", "num_layers", "heads", "k_max", "max_span", "beta", "interaction", "attention",
                     "learning_rate", "epochs", "seed", "lambda"},
                 w);
  TrainConfig c;
  ModelConfig& m = c.model;
  m.d = get_size(j, "d", m.d, w);
  m.num_layers = get_size(j, "num_layers", m.num_layers, w);
  m.heads = get_size(j, "heads", m.heads, w);
  m.k_max = get_size(j, "k_max", m.k_max, w);
  m.max_span = get_size(j, "max_span", m.max_span, w);
  m.beta = get_double(j, "beta", m.beta, w);

  const std::string interaction = get_string(j, "interaction", interaction_mode_name(m.interaction), w);
  if (interaction == "learned") m.interaction = InteractionMode::Learned;
  else if (interaction == "passthrough") m.interaction = InteractionMode::Passthrough;
  else throw DataError("config: 'train.interaction' must be \"learned\" or \"passthrough\"");

  const std::string attention = get_string(j, "attention", attention_mode_name(m.attention), w);
  if (attention == "learned") m.attention = AttentionMode::Learned;
  else if (attention == "zero_query") m.attention = AttentionMode::ZeroQuery;
  else throw DataError("config: 'train.attention' must be \"learned\" or \"zero_query\"");

  c.learning_rate = get_double(j, "learning_rate", c.learning_rate, w);
  c.epochs = get_size(j, "epochs", c.epochs, w);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw DataError("config: 'train.seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("lambda")) {
    const json& l = j.at("lambda");
    const std::string lw = "train.lambda";
    require_object(l, lw);
    reject_unknown(l, {"count", "action", "location", "object"}, lw);
    c.lambda.count = get_double(l, "count", c.lambda.count, lw);
    c.lambda.action = get_double(l, "action", c.lambda.action, lw);
    c.lambda.location = get_double(l, "location", c.lambda.location, lw);
    c.lambda.object = get_double(l, "object", c.lambda.object, lw);
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return c;
}

ordered_json train_config_to_json(const TrainConfig& c) {
  ordered_json j;
  j["d"] = c.model.d;
  j["num_layers"] = c.model.num_layers;
  j["heads"] = c.model.heads;
  j["k_max"] = c.model.k_max;
  j["max_span"] = c.model.max_span;
  j["beta"] = c.model.beta;
  j["interaction"] = interaction_mode_name(c.model.interaction);
  j["attention"] = attention_mode_name(c.model.attention);
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["lambda"] = ordered_json{{"count", c.lambda.count},
                             {"action", c.lambda.action},
                             {"location", c.lambda.location},
                             {"object", c.lambda.object}};
  return j;
}

GrammarConfig grammar_config_from_json(const json& j) {
  const std::string w = "grammar";
  require_object(j, w);
  reject_unknown(j, {"actions", "objects", "locations", "connectors", "k_weights", "p_omit_location",
                     "p_omit_object", "seed"},
                 w);
  GrammarConfig g = GrammarConfig::defaults();
  g.actions = get_strings(j, "actions", g.actions, w);
  g.objects = get_strings(j, "objects", g.objects, w);
  g.locations = get_strings(j, "locations", g.locations, w);
  g.connectors = get_strings(j, "connectors", g.connectors, w);
  if (j.contains("k_weights")) {
    const json& v = j.at("k_weights");
    if (!v.is_array()) throw DataError("config: 'grammar.k_weights' must be an array of numbers");
    g.k_weights.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw DataError("config: 'grammar.k_weights' must be an array of numbers");
      g.k_weights.push_back(e.get<double>());
    }
  }
  g.p_omit_location = get_double(j, "p_omit_location", g.p_omit_location, w);
  g.p_omit_object = get_double(j, "p_omit_object", g.p_omit_object, w);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw DataError("config: 'grammar.seed' must be a non-negative integer");
    g.seed = j.at("seed").get<std::uint64_t>();
  }
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return g;
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("config: malformed JSON: ") + e.what());
  }
  require_object(j, "<root>");
  reject_unknown(j, {"train", "grammar", "paths"}, "<root>");
  RunConfig rc;
  if (j.contains("train")) rc.train = train_config_from_json(j.at("train"));
  if (j.contains("grammar")) rc.grammar = grammar_config_from_json(j.at("grammar"));
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    require_object(p, "paths");
    reject_unknown(p, {"pretrained_embeddings"}, "paths");
    rc.pretrained_embeddings = get_string(p, "pretrained_embeddings", "", "paths");
  }
  if (rc.train.model.k_max < rc.grammar.k_weights.size())
    throw DataError("config: grammar.k_weights has " + std::to_string(rc.grammar.k_weights.size()) +
                    " entries but train.k_max is " + std::to_string(rc.train.model.k_max));
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace slfnet
