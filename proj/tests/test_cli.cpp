#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "slfnet/checkpoint.hpp"
#include "slfnet/data.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = slfnet::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == slfnet::cli::kUsage);
  CHECK(cli({"bogus"}).code == slfnet::cli::kUsage);
  CHECK(cli({"gen-data", "--out", "/tmp/x.jsonl"}).code == slfnet::cli::kUsage);
  CHECK(cli({"gen-data", "--out", "/tmp/x.jsonl", "--n", "0"}).code == slfnet::cli::kUsage);
  CHECK(cli({"eval", "--checkpoint", "/nonexistent", "--data", "/nonexistent"}).code == slfnet::cli::kUsage);
  CHECK(cli({"--help"}).code == slfnet::cli::kOk);
}

TEST_CASE("gen-data") {
  TempDir dir("slfnet_cli_gen");
  const Run a = cli({"gen-data", "--out", dir / "a.jsonl", "--n", "40"});
  REQUIRE(a.code == 0);
  const Run b = cli({"gen-data", "--out", dir / "b.jsonl", "--n", "40"});
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  CHECK(a.out == b.out);

  const json summary = json::parse(a.out);
  CHECK(summary["n"] == 40);
  std::size_t total = 0;
  for (const auto& [k, v] : summary["k_histogram"].items()) total += v.get<std::size_t>();
  CHECK(total == 40);
  CHECK(slfnet::load_dataset(dir / "a.jsonl").size() == 40);

  write_file(dir / "cfg.json", R"({"grammar": {"seed": 99}})");
  cli({"gen-data", "--config", dir / "cfg.json", "--out", dir / "c.jsonl", "--n", "40"});
  CHECK(slurp(dir / "a.jsonl") != slurp(dir / "c.jsonl"));

  write_file(dir / "bad.json", R"({"grammar": {"sed": 99}})");
  const Run bad = cli({"gen-data", "--config", dir / "bad.json", "--out", dir / "d.jsonl", "--n", "4"});
  CHECK(bad.code == slfnet::cli::kUsage);
  CHECK(bad.err.find("grammar.sed") != std::string::npos);
}

TEST_CASE("train, eval and predict") {
  TempDir dir("slfnet_cli_train");
  write_file(dir / "cfg.json", R"({"train": {"d": 8, "epochs": 3, "learning_rate": 0.01, "seed": 4}})");
  REQUIRE(cli({"gen-data", "--out", dir / "data.jsonl", "--n", "10"}).code == 0);

  const Run tr = cli({"train", "--config", dir / "cfg.json", "--data", dir / "data.jsonl", "--out", dir / "m.json"});
  REQUIRE(tr.code == 0);
  std::istringstream lines(tr.out);
  std::string line;
  std::vector<json> rows;
  while (std::getline(lines, line)) rows.push_back(json::parse(line));
  REQUIRE(rows.size() == 4);
  for (std::size_t e = 0; e < 3; ++e) CHECK(rows[e]["epoch"] == e + 1);
  const json& summary = rows.back();
  CHECK(summary.contains("best_epoch"));
  CHECK(summary["test"] == 2);
  CHECK(summary["dev"] == 2);
  CHECK(summary["train"] == 6);
  CHECK(fs::exists(dir / "m.json.log.jsonl"));

  // Retraining reproduces the checkpoint and log byte for byte.
  cli({"train", "--config", dir / "cfg.json", "--data", dir / "data.jsonl", "--out", dir / "m2.json", "--log",
       dir / "m2.log"});
  CHECK(slurp(dir / "m.json") == slurp(dir / "m2.json"));
  CHECK(slurp(dir / "m.json.log.jsonl") == slurp(dir / "m2.log"));

  const Run ev = cli({"eval", "--checkpoint", dir / "m.json", "--data", dir / "data.jsonl", "--split", "test"});
  REQUIRE(ev.code == 0);
  const json report = json::parse(ev.out);
  std::set<std::string> keys;
  for (const auto& [k, v] : report.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"accuracy", "precision", "recall", "f_score", "C", "T", "L_correct", "P_pred", "R_gold"});
  CHECK(report["T"] == 2);
  CHECK(json::parse(cli({"eval", "--checkpoint", dir / "m.json", "--data", dir / "data.jsonl", "--split", "all"}).out)["T"] == 10);
  CHECK(cli({"eval", "--checkpoint", dir / "m.json", "--data", dir / "data.jsonl", "--split", "val"}).code == 2);

  const Run pr = cli({"predict", "--checkpoint", dir / "m.json", "--text", "open the door", "--heads", "0,2,0",
                      "--trace"});
  REQUIRE(pr.code == 0);
  const std::string trace_line = pr.out.substr(pr.out.rfind('{', pr.out.find("\"predicted_k\"")));
  const json trace = json::parse(trace_line);
  for (const char* k : {"predicted_k", "heads", "action_scores", "type_attention", "warnings"}) CHECK(trace.contains(k));
  CHECK(trace["heads"][0]["head"] == "count");

  CHECK(cli({"predict", "--checkpoint", dir / "m.json", "--text", "open the door", "--heads", "0,2"}).code == 2);
  CHECK(cli({"predict", "--checkpoint", dir / "m.json", "--text", "open the door", "--heads", "0,x,0"}).code == 2);
  CHECK(cli({"predict", "--checkpoint", dir / "m.json", "--text", "open the door", "--heads", "1,2,0"}).code == 2);
}

TEST_CASE("grad-check") {
  const Run ok = cli({"grad-check"});
  CHECK(ok.code == 0);
  const json report = json::parse(ok.out);
  CHECK(report["passed"] == true);
  CHECK(report["tolerance"] == 1e-4);
  std::set<std::string> names;
  for (const auto& p : report["parameters"]) {
    CHECK(names.insert(p["name"].get<std::string>()).second);
    CHECK(p["max_rel_error"].get<double>() <= 1e-4);
  }
  CHECK(names.count("attn.W_h") == 1);
  CHECK(names.count("count.q_A") == 1);
  CHECK(names.count("embedding") == 1);

  const Run bad = cli({"grad-check", "--corrupt", "location.W2"});
  CHECK(bad.code == slfnet::cli::kCheckFailed);
  CHECK(bad.err.find("location.W2") != std::string::npos);
  CHECK(cli({"grad-check", "--corrupt", "nothing"}).code == slfnet::cli::kUsage);
}

TEST_CASE("toy training run and empty predictions") {
  TempDir dir("slfnet_cli_toy");
  write_file(dir / "cfg.json", R"({"train": {"d": 8, "epochs": 50, "learning_rate": 0.01}})");
  REQUIRE(cli({"gen-data", "--out", dir / "data.jsonl", "--n", "16"}).code == 0);
  CHECK(cli({"train", "--config", dir / "cfg.json", "--data", dir / "missing.jsonl", "--out", dir / "m.json"}).code ==
        slfnet::cli::kUsage);
  const Run tr = cli({"train", "--config", dir / "cfg.json", "--data", dir / "data.jsonl", "--out", dir / "m.json"});
  REQUIRE(tr.code == 0);
  std::istringstream log(slurp(dir / "m.json.log.jsonl"));
  std::string line;
  std::size_t epochs = 0;
  while (std::getline(log, line)) {
    const json row = json::parse(line);
    CHECK(row["epoch"] == ++epochs);
    CHECK(std::isfinite(row["loss"].get<double>()));
  }
  CHECK(epochs == 50);

  // A checkpoint whose count head is zero always predicts k = 0.
  slfnet::Checkpoint ck = slfnet::load_checkpoint(dir / "m.json");
  slfnet::Tensor& w1 = ck.model.params.value(ck.model.count_head.W1);
  w1 = slfnet::Tensor(w1.shape());
  slfnet::save_checkpoint(dir / "empty.json", ck.config, ck.model);
  const Run pr = cli({"predict", "--checkpoint", dir / "empty.json", "--text", "open the door", "--heads", "0,2,0"});
  CHECK(pr.code == 0);
  CHECK(pr.out.empty());
}
