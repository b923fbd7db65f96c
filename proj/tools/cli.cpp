#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slfnet/checkpoint.hpp"
#include "slfnet/config.hpp"
#include "slfnet/data.hpp"
#include "slfnet/decoder.hpp"
#include "slfnet/errors.hpp"
#include "slfnet/grad_check.hpp"
#include "slfnet/metrics.hpp"
#include "slfnet/synth.hpp"
#include "slfnet/training.hpp"

namespace slfnet::cli {
namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw DataError(std::string(what) + " '" + path + "' does not exist");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

int gen_data(const std::string& config_path, const std::string& out_path, long long n,
             std::ostream& out) {
  if (n <= 0) throw UsageError("--n must be at least 1");
  const RunConfig rc = config_or_default(config_path);
  std::ofstream file = open_output(out_path);
  const auto examples = generate_synthetic(rc.grammar, static_cast<std::size_t>(n));
  write_dataset(file, examples);
  file.close();
  if (!file) throw DataError("failed writing '" + out_path + "'");

  std::map<std::size_t, std::size_t> histogram;
  for (const auto& ex : examples) ++histogram[ex.groups.size()];
  ordered_json hist = ordered_json::object();
  for (const auto& [k, count] : histogram) hist[std::to_string(k)] = count;
  ordered_json summary;
  summary["n"] = examples.size();
  summary["k_histogram"] = hist;
  summary["vocabulary_size"] = build_vocabulary(examples).size();
  out << summary.dump() << '\n';
  return kOk;
}

ordered_json epoch_json(const EpochLog& log) {
  ordered_json j;
  j["epoch"] = log.epoch;
  j["loss"] = log.loss;
  j["dev_accuracy"] = log.dev_accuracy;
  j["dev_f"] = log.dev_f;
  return j;
}

int train_cmd(const std::string& config_path, const std::string& data_path, const std::string& out_path,
              std::string log_path, std::ostream& out) {
  const RunConfig rc = config_or_default(config_path);
  require_file(data_path, "data file");
  if (!rc.pretrained_embeddings.empty()) require_file(rc.pretrained_embeddings, "pretrained embeddings");
  if (log_path.empty()) log_path = out_path + ".log.jsonl";
  std::ofstream checkpoint_file = open_output(out_path);
  std::ofstream log_file = open_output(log_path);

  const DatasetSplit split = split_dataset(load_dataset(data_path, rc.train.model.k_max), rc.train.seed);
  std::optional<EmbeddingTable> pretrained;
  TrainOptions options;
  if (!rc.pretrained_embeddings.empty()) {
    pretrained = load_pretrained_embeddings(rc.pretrained_embeddings, build_vocabulary(split.train),
                                            rc.train.seed, rc.train.model.d);
    options.embeddings = &*pretrained;
  }
  options.on_epoch = [&](const EpochLog& log) {
    const std::string line = epoch_json(log).dump();
    log_file << line << '\n';
    out << line << '\n';
  };
  const TrainResult result = train(split.train, split.dev, rc.train, options);
  checkpoint_file << serialize_checkpoint(rc.train, result.model);
  checkpoint_file.close();
  log_file.close();
  if (!checkpoint_file || !log_file) throw DataError("failed writing training outputs");

  ordered_json summary;
  summary["best_epoch"] = result.best_epoch;
  summary["train"] = split.train.size();
  summary["dev"] = split.dev.size();
  summary["test"] = split.test.size();
  summary["checkpoint"] = out_path;
  out << summary.dump() << '\n';
  return kOk;
}

std::vector<NLCExample> select_split(std::vector<NLCExample> examples, const std::string& which,
                                     std::uint64_t seed) {
  if (which == "all") return examples;
  DatasetSplit split = split_dataset(std::move(examples), seed);
  if (which == "train") return std::move(split.train);
  if (which == "dev") return std::move(split.dev);
  return std::move(split.test);
}

int eval_cmd(const std::string& checkpoint_path, const std::string& data_path, const std::string& which,
             std::ostream& out) {
  require_file(checkpoint_path, "checkpoint");
  require_file(data_path, "data file");
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const auto examples =
      select_split(load_dataset(data_path, ck.config.model.k_max), which, ck.config.seed);
  const MetricsReport r = evaluate(ck.model, examples);
  ordered_json j;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_score"] = r.f_score;
  j["C"] = r.C;
  j["T"] = r.T;
  j["L_correct"] = r.L_correct;
  j["P_pred"] = r.P_pred;
  j["R_gold"] = r.R_gold;
  out << j.dump() << '\n';
  return kOk;
}

std::vector<std::size_t> parse_heads(const std::string& text) {
  std::vector<std::size_t> heads;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size())
      throw UsageError("--heads must be comma-separated non-negative integers, got '" + text + "'");
    heads.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return heads;
}

ordered_json trace_json(const DecodeTrace& trace) {
  ordered_json j;
  j["predicted_k"] = trace.predicted_k;
  ordered_json heads = ordered_json::array();
  for (const auto& inv : trace.invocations)
    heads.push_back({{"head", slot_kind_name(inv.kind)}, {"group", inv.group}, {"distribution", inv.distribution}});
  j["heads"] = heads;
  ordered_json actions = ordered_json::array();
  for (const auto& [span, score] : trace.action_scores)
    actions.push_back({{"span", {span.start, span.end}}, {"score", score}});
  j["action_scores"] = actions;
  j["type_attention"] = trace.type_attention;
  j["warnings"] = trace.warnings;
  return j;
}

int predict_cmd(const std::string& checkpoint_path, const std::string& text, const std::string& heads_text,
                bool with_trace, std::ostream& out) {
  std::istringstream ss(text);
  std::vector<std::string> tokens;
  for (std::string w; ss >> w;) tokens.push_back(w);
  if (tokens.empty()) throw UsageError("--text must contain at least one token");
  const auto heads = parse_heads(heads_text);
  if (heads.size() != tokens.size())
    throw UsageError("--heads has " + std::to_string(heads.size()) + " entries for " +
                     std::to_string(tokens.size()) + " tokens");
  NLCExample sentence;
  sentence.id = "predict";
  sentence.tokens = tokens;
  sentence.dep_heads = heads;
  validate_example(sentence);
  require_file(checkpoint_path, "checkpoint");
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const SlfParse parse = decode(ck.model, tokens, heads);
  const std::string rendered = render_slf(parse.groups, tokens);
  if (!rendered.empty()) out << rendered << '\n';
  if (with_trace) out << trace_json(parse.trace).dump() << '\n';
  return kOk;
}

// First generated example with exactly `length` tokens.
NLCExample example_of_length(GrammarConfig grammar, std::uint64_t seed, std::size_t length) {
  grammar.seed = seed;
  for (const auto& ex : generate_synthetic(grammar, 1000))
    if (ex.tokens.size() == length) return ex;
  throw DataError("grammar produced no " + std::to_string(length) + "-token example in 1000 draws");
}

int grad_check_cmd(const std::string& config_path, std::optional<std::uint64_t> seed_flag, double step,
                   const std::string& corrupt, std::ostream& out, std::ostream& err) {
  const RunConfig rc = config_or_default(config_path);
  const std::uint64_t seed = seed_flag.value_or(rc.train.seed);
  TrainConfig config = rc.train;
  config.model.d = 8;
  const NLCExample ex = example_of_length(rc.grammar, seed, 4);
  SlfModel model = SlfModel::create(config.model, build_vocabulary({ex}), seed);

  GradCheckOptions options;
  options.step = step;
  if (!corrupt.empty()) {
    const auto id = model.params.find(corrupt);
    if (!id) throw UsageError("--corrupt: no parameter named '" + corrupt + "'");
    options.analytic_hook = [id](Gradients& g) { g[*id][0] += 1e-3 * (std::abs(g[*id][0]) + 1.0); };
  }
  const GradCheckReport report = grad_check(
      model.params, [&](Tape& tape) { return compute_loss(tape, model, ex, config.lambda); }, options);

  ordered_json params = ordered_json::array();
  for (const auto& p : report.params)
    params.push_back({{"name", p.name},
                      {"coordinates", p.coordinates},
                      {"max_rel_error", p.max_rel_error},
                      {"ok", p.ok()}});
  ordered_json j;
  j["example"] = ex.id;
  j["tolerance"] = report.tolerance;
  j["passed"] = report.passed();
  j["parameters"] = params;
  out << j.dump() << '\n';
  if (report.passed()) return kOk;

  std::vector<const ParamCheck*> failed;
  for (const auto& p : report.params)
    if (!p.ok()) failed.push_back(&p);
  std::stable_sort(failed.begin(), failed.end(),
                   [](const ParamCheck* a, const ParamCheck* b) { return a->max_rel_error > b->max_rel_error; });
  err << "gradient check failed for " << failed.size() << " parameter(s):\n";
  for (const ParamCheck* p : failed)
    err << "  " << p->name << ": max relative error " << p->max_rel_error << " at index " << p->worst_index
        << " (analytic " << p->analytic << ", numeric " << p->numeric << ")\n";
  return kCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seq-to-slots command parser"};
  app.name("slfnet");
  app.require_subcommand(1);

  std::string config, data, out_path, log_path, checkpoint, split = "test", text, heads, corrupt;
  long long n = 0;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  double step = 1e-3;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset (JSON Lines)");
  gen->add_option("--config", config, "Run config JSON")->check(CLI::ExistingFile);
  gen->add_option("--out", out_path, "Output dataset path")->required();
  gen->add_option("--n", n, "Number of examples")->required();

  auto* tr = app.add_subcommand("train", "Train on the 6:2:2 train split and save the best-dev checkpoint");
  tr->add_option("--config", config, "Run config JSON")->check(CLI::ExistingFile);
  tr->add_option("--data", data, "Dataset (JSON Lines)")->required();
  tr->add_option("--out", out_path, "Checkpoint path")->required();
  tr->add_option("--log", log_path, "Per-epoch log path (default: <out>.log.jsonl)");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on one split of a dataset");
  ev->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  ev->add_option("--data", data, "Dataset (JSON Lines)")->required();
  ev->add_option("--split", split, "train, dev, test or all")
      ->check(CLI::IsMember({"train", "dev", "test", "all"}));

  auto* pr = app.add_subcommand("predict", "Parse one command");
  pr->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  pr->add_option("--text", text, "Whitespace-tokenized command")->required();
  pr->add_option("--heads", heads, "Comma-separated dependency heads, root = own index")->required();
  pr->add_flag("--trace", trace, "Print per-head distributions as JSON");

  auto* gc = app.add_subcommand("grad-check", "Check analytic gradients of the full loss (d=8)");
  gc->add_option("--config", config, "Run config JSON")->check(CLI::ExistingFile);
  gc->add_option("--seed", seed, "Model and example seed (default: train.seed)");
  gc->add_option("--step", step, "Central-difference step")->check(CLI::PositiveNumber);
  gc->add_option("--corrupt", corrupt, "Perturb this parameter's analytic gradient")->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return gen_data(config, out_path, n, out);
    if (tr->parsed()) return train_cmd(config, data, out_path, log_path, out);
    if (ev->parsed()) return eval_cmd(checkpoint, data, split, out);
    if (pr->parsed()) return predict_cmd(checkpoint, text, heads, trace, out);
    return grad_check_cmd(config, seed, step, corrupt, out, err);
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace slfnet::cli
