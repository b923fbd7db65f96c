#include "slfnet/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slfnet/config.hpp"
#include "slfnet/errors.hpp"

namespace slfnet {

using nlohmann::json;

namespace {

void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw DivergenceError("cannot checkpoint a non-finite parameter value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string serialize_checkpoint(const TrainConfig& config, const SlfModel& model) {
  std::string out = "{\"format_version\":" + std::to_string(kCheckpointVersion) + ",\n";
  out += "\"config\":" + train_config_to_json(config).dump() + ",\n";
  out += "\"vocabulary\":" + json(model.vocab.tokens()).dump() + ",\n";
  out += "\"parameters\":{";
  for (ParamId id = 0; id < model.params.size(); ++id) {
    const Tensor& t = model.params.value(id);
    out += id ? ",\n" : "\n";
    out += json(model.params.name(id)).dump() + ":{\"shape\":[";
    for (std::size_t a = 0; a < t.rank(); ++a) {
      if (a) out += ',';
      out += std::to_string(t.shape()[a]);
    }
    out += "],\"values\":[";
    const auto values = t.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ',';
      append_double(out, values[i]);
    }
    out += "]}";
  }
  out += "\n}}\n";
  return out;
}

void save_checkpoint(const std::string& path, const TrainConfig& config, const SlfModel& model) {
  const std::string text = serialize_checkpoint(config, model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint parse_checkpoint(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("checkpoint: top level must be an object");
  for (const char* key : {"format_version", "config", "vocabulary", "parameters"})
    if (!j.contains(key)) throw DataError(std::string("checkpoint: missing '") + key + "'");
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kCheckpointVersion)
    throw DataError("checkpoint: format_version " + j["format_version"].dump() + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");

  const TrainConfig config = train_config_from_json(j["config"]);
  std::vector<std::string> tokens;
  try {
    tokens = j["vocabulary"].get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw DataError("checkpoint: 'vocabulary' must be an array of strings");
  }
  Checkpoint ck{config, SlfModel::create(config.model, Vocabulary::from_list(tokens), config.seed)};

  const json& params = j["parameters"];
  if (!params.is_object()) throw DataError("checkpoint: 'parameters' must be an object");
  std::set<std::string> seen;
  for (ParamId id = 0; id < ck.model.params.size(); ++id) {
    const std::string& name = ck.model.params.name(id);
    if (!params.contains(name)) throw DataError("checkpoint: missing parameter '" + name + "'");
    seen.insert(name);
    const json& p = params[name];
    Tensor& dst = ck.model.params.value(id);
    if (!p.is_object() || !p.contains("shape") || !p.contains("values"))
      throw DataError("checkpoint: parameter '" + name + "' needs 'shape' and 'values'");
    std::vector<std::size_t> shape;
    try {
      shape = p["shape"].get<std::vector<std::size_t>>();
    } catch (const json::exception&) {
      throw DataError("checkpoint: parameter '" + name + "' has a malformed shape");
    }
    bool match = shape.size() == dst.rank();
    for (std::size_t a = 0; match && a < shape.size(); ++a) match = shape[a] == dst.shape()[a];
    if (!match)
      throw DataError("checkpoint: parameter '" + name + "' has shape " + p["shape"].dump() +
                      ", expected " + dst.shape().str());
    const json& values = p["values"];
    if (!values.is_array() || values.size() != dst.size())
      throw DataError("checkpoint: parameter '" + name + "' needs " + std::to_string(dst.size()) +
                      " values");
    auto out = dst.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!values[i].is_number())
        throw DataError("checkpoint: parameter '" + name + "' has a non-numeric value");
      out[i] = values[i].get<double>();
    }
  }
  for (const auto& item : params.items())
    if (!seen.count(item.key())) throw DataError("checkpoint: unknown parameter '" + item.key() + "'");
  return ck;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace slfnet
