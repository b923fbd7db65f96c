#pragma once

// Token embedding, BiLSTM and the dependency-fused BiLSTM sentence encoder.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slfnet/params.hpp"
#include "slfnet/rng.hpp"
#include "slfnet/tape.hpp"

namespace slfnet {

/// Token → row index. Row 0 is always the unknown token.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();
  // Builds a vocabulary from the distinct tokens, sorted; "<unk>" is prepended.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);
  // Restores a vocabulary saved with tokens(); element 0 must be "<unk>".
  static Vocabulary from_list(const std::vector<std::string>& list);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t index(std::string_view token) const;  // kUnknown when absent
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::vector<std::size_t> indices(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct EmbeddingTable {
  Vocabulary vocab;
  Tensor vectors;  // [V×d]
  std::size_t unknown_index = Vocabulary::kUnknown;
};

/// Weights of one LSTM direction. Gate order in the stacked rows: input, forget, cell, output.
struct LstmParams {
  ParamId W_x = 0;  // [4h×d_in]
  ParamId W_h = 0;  // [4h×h]
  ParamId b = 0;    // [4h]
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
};

struct BiLstmParams {
  LstmParams fwd;
  LstmParams bwd;
  std::size_t output_dim() const noexcept { return fwd.hidden + bwd.hidden; }
};

enum class InteractionMode { Learned, Passthrough };

struct InteractionParams {
  ParamId W_g = 0;  // [d×2d]
  ParamId b_g = 0;  // [d]
};

struct DepFusedConfig {
  std::size_t num_layers = 2;
  InteractionMode mode = InteractionMode::Learned;
};

struct DepFusedParams {
  std::vector<InteractionParams> interactions;  // empty in passthrough mode
  std::vector<BiLstmParams> layers;
};

// Adds a BiLSTM with output dimension d (d/2 per direction) under `prefix`.
// Weights uniform in [-1/sqrt(d), 1/sqrt(d)], forget-gate bias shifted by +1.
BiLstmParams add_bilstm(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                        std::size_t d, Xorshift64Star& rng);
InteractionParams add_interaction(ParamStore& store, const std::string& prefix, std::size_t d,
                                  Xorshift64Star& rng);
DepFusedParams add_dep_fused(ParamStore& store, const std::string& prefix, std::size_t d,
                             const DepFusedConfig& config, Xorshift64Star& rng);

// Column i is the table row of token i (unknown row for out-of-vocabulary tokens).
Var embed_tokens(Tape& tape, ParamId table, const Vocabulary& vocab,
                 const std::vector<std::string>& tokens);

// inputs [d_in×L] → [d×L]; column i = [forward state at i; backward state at i].
Var bilstm_encode(Tape& tape, Var inputs, const BiLstmParams& params);

// g(h_i, h_parent): tanh(W_g [h_i; h_parent] + b_g) when learned, h_i when passthrough.
Var interaction_g(Tape& tape, Var h_i, Var h_parent, InteractionMode mode,
                  const InteractionParams* params);

// f(H): column i = g(H[:, i], H[:, heads[i]]).
Var interaction_layer(Tape& tape, Var hidden, std::span<const std::size_t> heads,
                      InteractionMode mode, const InteractionParams* params);

// Throws DataError naming the first token whose head is outside [0, length).
void validate_heads(std::span<const std::size_t> heads, std::size_t length);

// H(0) = embeddings, H(l+1) = BiLSTM(f(H(l))); returns H(num_layers).
Var dep_fused_encode(Tape& tape, Var embeddings, std::span<const std::size_t> heads,
                     const DepFusedConfig& config, const DepFusedParams& params);

/// Slot-value encoder over sub-spans of one sentence.
///
/// encode(s, e) equals the last column of bilstm_encode over columns s..e of
/// the inputs, bit for bit. Forward runs are shared between spans with the
/// same start.
class SpanEncoder {
 public:
  SpanEncoder(Tape& tape, const BiLstmParams& params, Var inputs);
  Var encode(std::size_t start, std::size_t end);
  std::size_t length() const noexcept { return length_; }

 private:
  Tape* tape_;
  const BiLstmParams* params_;
  std::size_t length_;
  Var wx_fwd_;
  Var wx_bwd_;
  std::vector<std::vector<Var>> fwd_states_;  // per start: states at start, start+1, ...
  std::vector<Var> bwd_first_;                // per end: first backward step
};

}  // namespace slfnet
