#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "helpers.hpp"
#include "slfnet/checkpoint.hpp"
#include "slfnet/errors.hpp"

using namespace slfnet;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.model.d = 8;
  c.model.heads = 3;
  c.model.interaction = InteractionMode::Passthrough;
  c.learning_rate = 0.002;
  c.seed = 11;
  c.lambda.action = 0.5;
  return c;
}

std::string data_error(const std::string& text) {
  try {
    parse_checkpoint(text);
  } catch (const DataError& e) {
    return e.what();
  }
  FAIL("expected DataError");
  return {};
}

}  // namespace

TEST_CASE("checkpoint round trip is exact") {
  const TrainConfig cfg = small_config();
  SlfModel m = SlfModel::create(cfg.model, build_vocabulary({testing::kitchen_example()}), cfg.seed);
  m.params.value(m.attention.W_h)[0] = 1.0 / 3.0;
  m.params.value(m.attention.W_h)[1] = -0.1;
  m.params.value(m.attention.W_h)[2] = 5e-324;

  const std::string text = serialize_checkpoint(cfg, m);
  const Checkpoint back = parse_checkpoint(text);
  CHECK(back.model.vocab.tokens() == m.vocab.tokens());
  CHECK(back.config.learning_rate == cfg.learning_rate);
  CHECK(back.config.model.heads == 3);
  CHECK(back.config.model.interaction == InteractionMode::Passthrough);
  CHECK(back.config.lambda.action == 0.5);
  REQUIRE(back.model.params.size() == m.params.size());
  for (ParamId id = 0; id < m.params.size(); ++id) {
    CHECK(back.model.params.name(id) == m.params.name(id));
    CHECK(bit_identical(back.model.params.value(id), m.params.value(id)));
  }
  CHECK(serialize_checkpoint(back.config, back.model) == text);

  const auto path = std::filesystem::temp_directory_path() / "slfnet_checkpoint_test.json";
  save_checkpoint(path.string(), cfg, m);
  CHECK(serialize_checkpoint(load_checkpoint(path.string()).config, load_checkpoint(path.string()).model) == text);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const TrainConfig cfg = small_config();
  const SlfModel m = SlfModel::create(cfg.model, build_vocabulary({testing::kitchen_example()}), cfg.seed);
  const nlohmann::json good = nlohmann::json::parse(serialize_checkpoint(cfg, m));

  nlohmann::json j = good;
  j["format_version"] = 2;
  CHECK(data_error(j.dump()).find("version") != std::string::npos);

  j = good;
  j["parameters"]["action.W_a"]["shape"] = {8, 7};
  CHECK(data_error(j.dump()).find("action.W_a") != std::string::npos);

  j = good;
  j["parameters"]["object.e_nil"]["values"].erase(0);
  CHECK(data_error(j.dump()).find("object.e_nil") != std::string::npos);

  j = good;
  j["parameters"].erase("slot.fwd.b");
  CHECK(data_error(j.dump()).find("slot.fwd.b") != std::string::npos);

  j = good;
  j["parameters"]["extra.W"] = {{"shape", {1}}, {"values", {0.0}}};
  CHECK(data_error(j.dump()).find("extra.W") != std::string::npos);

  CHECK_THROWS_AS(parse_checkpoint("{not json"), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.json"), DataError);
}

TEST_CASE("non-finite parameters are not saved") {
  const TrainConfig cfg = small_config();
  SlfModel m = SlfModel::create(cfg.model, build_vocabulary({testing::kitchen_example()}), cfg.seed);
  m.params.value(m.action_head.W_A)[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(serialize_checkpoint(cfg, m), DivergenceError);
}
