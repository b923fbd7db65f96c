#include "slfnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slfnet/errors.hpp"
#include "slfnet/rng.hpp"

namespace slfnet {

using nlohmann::json;
using nlohmann::ordered_json;

void validate_example(const NLCExample& ex, std::size_t k_max, std::size_t line) {
  const std::size_t n = ex.tokens.size();
  auto fail = [&](const std::string& msg) { throw DataError(msg, line); };
  if (n == 0) fail("field 'tokens': empty token list");
  if (ex.dep_heads.size() != n)
    fail("field 'dep_heads': " + std::to_string(ex.dep_heads.size()) + " heads for " +
         std::to_string(n) + " tokens");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ex.dep_heads[i] >= n)
      fail("field 'dep_heads': head " + std::to_string(ex.dep_heads[i]) + " of token " +
           std::to_string(i) + " is outside [0, " + std::to_string(n) + ")");
    if (ex.dep_heads[i] == i) ++roots;
  }
  if (roots != 1) fail("field 'dep_heads': expected exactly one root, found " + std::to_string(roots));
  if (ex.groups.size() > k_max)
    fail("field 'groups': " + std::to_string(ex.groups.size()) + " groups exceed k_max " +
         std::to_string(k_max));
  auto check_span = [&](const Span& s, const std::string& field) {
    if (s.start > s.end || s.end >= n)
      fail("field '" + field + "': span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
           "] outside sentence of length " + std::to_string(n));
  };
  for (std::size_t g = 0; g < ex.groups.size(); ++g) {
    const std::string prefix = "groups[" + std::to_string(g) + "].";
    check_span(ex.groups[g].action, prefix + "action");
    if (ex.groups[g].location) check_span(*ex.groups[g].location, prefix + "location");
    if (ex.groups[g].object) check_span(*ex.groups[g].object, prefix + "object");
    for (std::size_t h = 0; h < g; ++h)
      if (ex.groups[h].action.overlaps(ex.groups[g].action))
        fail("field 'groups': gold actions " + std::to_string(h) + " and " + std::to_string(g) +
             " overlap");
  }
}

namespace {

Span parse_span(const json& j, const std::string& field, std::size_t line) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw DataError("field '" + field + "': expected [start, end] integer pair", line);
  const auto s = j[0].get<long long>(), e = j[1].get<long long>();
  if (s < 0 || e < 0) throw DataError("field '" + field + "': negative span index", line);
  return {static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
}

OptSpan parse_opt_span(const json& obj, const char* key, const std::string& prefix, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError("field '" + prefix + key + "' is missing", line);
  if (it->is_null()) return std::nullopt;
  return parse_span(*it, prefix + key, line);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where,
                    std::size_t line) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw DataError(where + "unknown field '" + it.key() + "'", line);
}

ordered_json span_json(const OptSpan& s) {
  if (!s) return nullptr;
  return ordered_json::array({s->start, s->end});
}

}  // namespace

NLCExample parse_example(std::string_view text, std::size_t line, std::size_t k_max) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!j.is_object()) throw DataError("expected a JSON object", line);
  reject_unknown(j, {"id", "tokens", "dep_heads", "groups"}, "", line);
  for (const char* key : {"id", "tokens", "dep_heads", "groups"})
    if (!j.contains(key)) throw DataError(std::string("field '") + key + "' is missing", line);

  NLCExample ex;
  if (!j["id"].is_string()) throw DataError("field 'id': expected a string", line);
  ex.id = j["id"].get<std::string>();
  if (!j["tokens"].is_array()) throw DataError("field 'tokens': expected an array", line);
  for (const auto& t : j["tokens"]) {
    if (!t.is_string()) throw DataError("field 'tokens': expected strings", line);
    ex.tokens.push_back(t.get<std::string>());
  }
  if (!j["dep_heads"].is_array()) throw DataError("field 'dep_heads': expected an array", line);
  for (const auto& h : j["dep_heads"]) {
    if (!h.is_number_integer()) throw DataError("field 'dep_heads': expected integers", line);
    const auto v = h.get<long long>();
    if (v < 0)
      throw DataError("field 'dep_heads': head " + std::to_string(v) + " is negative", line);
    ex.dep_heads.push_back(static_cast<std::size_t>(v));
  }
  if (!j["groups"].is_array()) throw DataError("field 'groups': expected an array", line);
  for (std::size_t g = 0; g < j["groups"].size(); ++g) {
    const json& gj = j["groups"][g];
    const std::string prefix = "groups[" + std::to_string(g) + "].";
    if (!gj.is_object()) throw DataError("field 'groups[" + std::to_string(g) + "]': expected an object", line);
    reject_unknown(gj, {"action", "location", "object"}, prefix, line);
    if (!gj.contains("action")) throw DataError("field '" + prefix + "action' is missing", line);
    SlfGroup grp;
    grp.action = parse_span(gj["action"], prefix + "action", line);
    grp.location = parse_opt_span(gj, "location", prefix, line);
    grp.object = parse_opt_span(gj, "object", prefix, line);
    ex.groups.push_back(grp);
  }
  validate_example(ex, k_max, line);
  return ex;
}

std::string format_example(const NLCExample& ex) {
  ordered_json j;
  j["id"] = ex.id;
  j["tokens"] = ex.tokens;
  j["dep_heads"] = ex.dep_heads;
  j["groups"] = ordered_json::array();
  for (const auto& g : ex.groups) {
    ordered_json gj;
    gj["action"] = span_json(g.action);
    gj["location"] = span_json(g.location);
    gj["object"] = span_json(g.object);
    j["groups"].push_back(std::move(gj));
  }
  return j.dump();
}

std::vector<NLCExample> read_dataset(std::istream& in, std::size_t k_max) {
  std::vector<NLCExample> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_example(text, line, k_max));
  }
  return out;
}

std::vector<NLCExample> load_dataset(const std::string& path, std::size_t k_max) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(in, k_max);
}

void write_dataset(std::ostream& out, const std::vector<NLCExample>& examples) {
  for (const auto& ex : examples) out << format_example(ex) << '\n';
}

void save_dataset(const std::string& path, const std::vector<NLCExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset '" + path + "'");
  write_dataset(out, examples);
  if (!out) throw DataError("failed writing dataset '" + path + "'");
}

DatasetSplit split_dataset(std::vector<NLCExample> examples, std::uint64_t seed) {
  if (examples.size() < 5)
    throw DomainError("split_dataset needs at least 5 examples, got " + std::to_string(examples.size()));
  std::stable_sort(examples.begin(), examples.end(),
                   [](const NLCExample& a, const NLCExample& b) { return a.id < b.id; });
  Xorshift64Star rng(seed);
  rng.shuffle(examples);
  const std::size_t n = examples.size();
  const std::size_t n_dev = n / 5, n_test = n / 5;
  const std::size_t n_train = n - n_dev - n_test;
  DatasetSplit s;
  auto first = std::make_move_iterator(examples.begin());
  s.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  s.dev.assign(first + static_cast<std::ptrdiff_t>(n_train),
               first + static_cast<std::ptrdiff_t>(n_train + n_dev));
  s.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_dev), std::make_move_iterator(examples.end()));
  return s;
}

Vocabulary build_vocabulary(const std::vector<NLCExample>& examples) {
  std::vector<std::string> all;
  for (const auto& ex : examples) all.insert(all.end(), ex.tokens.begin(), ex.tokens.end());
  return Vocabulary::from_tokens(all);
}

EmbeddingTable read_pretrained_embeddings(std::istream& in, const Vocabulary& vocab,
                                          std::uint64_t seed, std::size_t expected_dim,
                                          PretrainedReport* report) {
  std::map<std::string, std::vector<double>> found;
  std::size_t dim = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream ss(text);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> values;
    std::string field;
    while (ss >> field) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError("bad number '" + field + "' for token '" + token + "'", line);
      values.push_back(v);
    }
    if (values.empty()) throw DataError("token '" + token + "' has no vector", line);
    if (dim == 0) dim = values.size();
    if (values.size() != dim)
      throw DataError("vector of '" + token + "' has dimension " + std::to_string(values.size()) +
                          ", earlier lines have " + std::to_string(dim),
                      line);
    if (expected_dim && dim != expected_dim)
      throw DataError("vector dimension " + std::to_string(dim) + " differs from model dimension " +
                          std::to_string(expected_dim),
                      line);
    if (vocab.contains(token)) found.emplace(token, std::move(values));
  }
  if (dim == 0) dim = expected_dim;
  if (dim == 0) throw DataError("pretrained vector file is empty");

  Xorshift64Star rng(seed);
  EmbeddingTable table{vocab, Tensor(Shape{vocab.size(), dim}), Vocabulary::kUnknown};
  PretrainedReport rep;
  rep.dim = dim;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    // one draw per coordinate for every row keeps the stream independent of file coverage
    std::vector<double> random(dim);
    for (double& v : random) v = rng.uniform(-0.1, 0.1);
    if (i == Vocabulary::kUnknown) continue;
    auto it = found.find(vocab.token(i));
    const std::vector<double>& src = it != found.end() ? it->second : random;
    if (it != found.end()) ++rep.found; else rep.missing.push_back(vocab.token(i));
    for (std::size_t j = 0; j < dim; ++j) table.vectors.at(i, j) = src[j];
  }
  if (report) *report = std::move(rep);
  return table;
}

EmbeddingTable load_pretrained_embeddings(const std::string& path, const Vocabulary& vocab,
                                          std::uint64_t seed, std::size_t expected_dim,
                                          PretrainedReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pretrained vectors '" + path + "'");
  return read_pretrained_embeddings(in, vocab, seed, expected_dim, report);
}

}  // namespace slfnet
