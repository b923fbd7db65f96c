#include "slfnet/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "slfnet/errors.hpp"
#include "slfnet/types.hpp"

namespace slfnet {

std::string span_text(const std::vector<std::string>& tokens, const Span& span) {
  std::string out;
  for (std::size_t i = span.start; i <= span.end && i < tokens.size(); ++i) {
    if (i > span.start) out += ' ';
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() : tokens_{std::string(kUnknownToken)} {
  index_.emplace(tokens_[0], kUnknown);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> sorted = tokens;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Vocabulary v;
  for (auto& t : sorted) {
    if (t == kUnknownToken) continue;
    v.index_.emplace(t, v.tokens_.size());
    v.tokens_.push_back(std::move(t));
  }
  return v;
}

Vocabulary Vocabulary::from_list(const std::vector<std::string>& list) {
  if (list.empty() || list[0] != kUnknownToken)
    throw DataError("vocabulary must start with the unknown token \"<unk>\"");
  Vocabulary v;
  for (std::size_t i = 1; i < list.size(); ++i) {
    if (!v.index_.emplace(list[i], i).second)
      throw DataError("duplicate vocabulary token '" + list[i] + "'");
    v.tokens_.push_back(list[i]);
  }
  return v;
}

std::size_t Vocabulary::index(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::vector<std::size_t> Vocabulary::indices(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(index(t));
  return ids;
}

namespace {

LstmParams add_lstm(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                    std::size_t hidden, double bound, Xorshift64Star& rng) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.W_x = store.add(prefix + ".W_x", uniform_tensor(Shape{4 * hidden, input_dim}, bound, rng));
  p.W_h = store.add(prefix + ".W_h", uniform_tensor(Shape{4 * hidden, hidden}, bound, rng));
  Tensor b = uniform_tensor(Shape{4 * hidden}, bound, rng);
  for (std::size_t j = hidden; j < 2 * hidden; ++j) b[j] += 1.0;
  p.b = store.add(prefix + ".b", std::move(b));
  return p;
}

struct StepState {
  Var state;  // [h; c]
  Var h;
};

StepState initial_state(Tape& tape, std::size_t hidden) {
  return {tape.constant(Tensor(Shape{2 * hidden})), tape.constant(Tensor(Shape{hidden}))};
}

// Input projections W_x·X + b for every column at once.
Var project_inputs(Tape& tape, const LstmParams& p, Var inputs) {
  return ad::add_to_columns(ad::matmul(tape.param(p.W_x), inputs), tape.param(p.b));
}

StepState lstm_step(Tape& tape, const LstmParams& p, Var wx, std::size_t col,
                    const StepState& prev) {
  Var gates = ad::add(ad::column(wx, col), ad::matmul(tape.param(p.W_h), prev.h));
  Var state = ad::lstm_cell(gates, prev.state);
  return {state, ad::slice(state, 0, p.hidden)};
}

}  // namespace

BiLstmParams add_bilstm(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                        std::size_t d, Xorshift64Star& rng) {
  if (d == 0 || d % 2 != 0)
    throw DomainError("BiLSTM output dimension must be even and positive, got " +
                      std::to_string(d));
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  BiLstmParams p;
  p.fwd = add_lstm(store, prefix + ".fwd", input_dim, d / 2, bound, rng);
  p.bwd = add_lstm(store, prefix + ".bwd", input_dim, d / 2, bound, rng);
  return p;
}

InteractionParams add_interaction(ParamStore& store, const std::string& prefix, std::size_t d,
                                  Xorshift64Star& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  InteractionParams p;
  p.W_g = store.add(prefix + ".W_g", uniform_tensor(Shape{d, 2 * d}, bound, rng));
  p.b_g = store.add(prefix + ".b_g", uniform_tensor(Shape{d}, bound, rng));
  return p;
}

DepFusedParams add_dep_fused(ParamStore& store, const std::string& prefix, std::size_t d,
                             const DepFusedConfig& config, Xorshift64Star& rng) {
  if (config.num_layers == 0) throw DomainError("dependency-fused encoder needs num_layers >= 1");
  DepFusedParams p;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::string layer = prefix + ".layer" + std::to_string(l);
    if (config.mode == InteractionMode::Learned)
      p.interactions.push_back(add_interaction(store, layer + ".g", d, rng));
    p.layers.push_back(add_bilstm(store, layer + ".lstm", d, d, rng));
  }
  return p;
}

Var embed_tokens(Tape& tape, ParamId table, const Vocabulary& vocab,
                 const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw DomainError("cannot embed an empty token list");
  const auto ids = vocab.indices(tokens);
  return ad::lookup_columns(tape.param(table), ids);
}

Var bilstm_encode(Tape& tape, Var inputs, const BiLstmParams& params) {
  const Tensor& x = inputs.value();
  if (x.rank() != 2 || x.cols() == 0)
    throw DimensionError("bilstm_encode expects [d_in×L] with L >= 1, got " + x.shape().str());
  const std::size_t len = x.cols();
  Var wxf = project_inputs(tape, params.fwd, inputs);
  Var wxb = project_inputs(tape, params.bwd, inputs);

  std::vector<Var> hf(len), hb(len);
  StepState s = initial_state(tape, params.fwd.hidden);
  for (std::size_t t = 0; t < len; ++t) {
    s = lstm_step(tape, params.fwd, wxf, t, s);
    hf[t] = s.h;
  }
  s = initial_state(tape, params.bwd.hidden);
  for (std::size_t t = len; t-- > 0;) {
    s = lstm_step(tape, params.bwd, wxb, t, s);
    hb[t] = s.h;
  }
  return ad::concat({ad::stack_columns(hf), ad::stack_columns(hb)}, 0);
}

Var interaction_g(Tape& tape, Var h_i, Var h_parent, InteractionMode mode,
                  const InteractionParams* params) {
  if (!(h_i.shape() == h_parent.shape()))
    throw DimensionError("interaction_g: " + h_i.shape().str() + " vs " + h_parent.shape().str());
  if (mode == InteractionMode::Passthrough) return h_i;
  if (!params) throw ContractError("learned interaction needs parameters");
  Var joint = ad::concat({h_i, h_parent}, 0);
  return ad::tanh(ad::add(ad::matmul(tape.param(params->W_g), joint), tape.param(params->b_g)));
}

Var interaction_layer(Tape& tape, Var hidden, std::span<const std::size_t> heads,
                      InteractionMode mode, const InteractionParams* params) {
  if (mode == InteractionMode::Passthrough) return hidden;
  if (!params) throw ContractError("learned interaction needs parameters");
  Var parents = ad::select_columns(hidden, heads);
  Var joint = ad::concat({hidden, parents}, 0);
  return ad::tanh(
      ad::add_to_columns(ad::matmul(tape.param(params->W_g), joint), tape.param(params->b_g)));
}

void validate_heads(std::span<const std::size_t> heads, std::size_t length) {
  if (heads.size() != length)
    throw DataError("expected " + std::to_string(length) + " dependency heads, got " +
                    std::to_string(heads.size()));
  for (std::size_t i = 0; i < heads.size(); ++i)
    if (heads[i] >= length)
      throw DataError("dependency head " + std::to_string(heads[i]) + " of token " +
                      std::to_string(i) + " is outside [0, " + std::to_string(length) + ")");
}

Var dep_fused_encode(Tape& tape, Var embeddings, std::span<const std::size_t> heads,
                     const DepFusedConfig& config, const DepFusedParams& params) {
  const std::size_t len = embeddings.value().cols();
  validate_heads(heads, len);
  if (params.layers.size() != config.num_layers)
    throw ContractError("encoder has " + std::to_string(params.layers.size()) +
                        " layers, config asks for " + std::to_string(config.num_layers));
  if (config.mode == InteractionMode::Learned && params.interactions.size() != config.num_layers)
    throw ContractError("learned interaction mode without interaction parameters");
  Var h = embeddings;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const InteractionParams* g =
        config.mode == InteractionMode::Learned ? &params.interactions[l] : nullptr;
    h = bilstm_encode(tape, interaction_layer(tape, h, heads, config.mode, g), params.layers[l]);
  }
  return h;
}

SpanEncoder::SpanEncoder(Tape& tape, const BiLstmParams& params, Var inputs)
    : tape_(&tape), params_(&params), length_(inputs.value().cols()) {
  wx_fwd_ = project_inputs(tape, params.fwd, inputs);
  wx_bwd_ = project_inputs(tape, params.bwd, inputs);
  fwd_states_.resize(length_);
  bwd_first_.resize(length_);
}

Var SpanEncoder::encode(std::size_t start, std::size_t end) {
  if (start > end || end >= length_)
    throw DimensionError("span [" + std::to_string(start) + "," + std::to_string(end) +
                         "] outside sentence of length " + std::to_string(length_));
  auto& run = fwd_states_[start];
  const std::size_t h = params_->fwd.hidden;
  while (run.size() < end - start + 1) {
    StepState prev = run.empty() ? initial_state(*tape_, h)
                                 : StepState{run.back(), ad::slice(run.back(), 0, h)};
    run.push_back(lstm_step(*tape_, params_->fwd, wx_fwd_, start + run.size(), prev).state);
  }
  Var hf = ad::slice(run[end - start], 0, h);
  if (!bwd_first_[end].valid())
    bwd_first_[end] = lstm_step(*tape_, params_->bwd, wx_bwd_, end,
                                initial_state(*tape_, params_->bwd.hidden))
                          .h;
  return ad::concat({hf, bwd_first_[end]}, 0);
}

}  // namespace slfnet
