#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slfnet/attention.hpp"
#include "slfnet/encoders.hpp"
#include "slfnet/heads.hpp"
#include "slfnet/params.hpp"

namespace slfnet {

struct ModelConfig {
  std::size_t d = 32;  // must be even
  std::size_t num_layers = 2;
  std::size_t heads = 2;
  std::size_t k_max = 3;
  std::size_t max_span = 3;
  double beta = 0.5;
  InteractionMode interaction = InteractionMode::Learned;
  AttentionMode attention = AttentionMode::Learned;

  // Throws DomainError describing the first invalid field.
  void validate() const;
};

/// Every trainable tensor of the parser plus its vocabulary.
///
/// Parameter names are stable and used by checkpoints:
///   embedding, nlc.layer<l>.{g.W_g, g.b_g, lstm.fwd.*, lstm.bwd.*},
///   slot.{fwd,bwd}.{W_x,W_h,b}, attn.head<i>.{W_Q,W_K}, attn.W_h,
///   count.*, action.*, location.*, object.*
struct SlfModel {
  ModelConfig config;
  Vocabulary vocab;
  ParamStore params;
  ParamId embedding = 0;  // [V×d]
  DepFusedParams nlc_encoder;
  BiLstmParams slot_encoder;
  MultiHeadParams attention;
  GroupCountParams count_head;
  ActionHeadParams action_head;
  LocationHeadParams location_head;
  ObjectHeadParams object_head;

  // Random initialization from `seed`. Embedding rows uniform in [-0.1, 0.1]; the
  // unknown row is zero.
  static SlfModel create(const ModelConfig& config, Vocabulary vocab, std::uint64_t seed);
};

// Replaces the embedding matrix; vocabularies must match.
void set_embeddings(SlfModel& model, const EmbeddingTable& table);

/// Shared forward state for one sentence: encoder output, attention keys,
/// slot-value encoder and the three type-query summaries.
class SentenceForward {
 public:
  SentenceForward(Tape& tape, const SlfModel& model, const std::vector<std::string>& tokens,
                  std::span<const std::size_t> heads);

  std::size_t length() const noexcept { return length_; }
  Var sentence() const noexcept { return sentence_; }
  Var summary_action() const noexcept { return summary_action_; }
  Var summary_location() const noexcept { return summary_location_; }
  Var summary_object() const noexcept { return summary_object_; }
  const std::vector<Var>& type_attention_weights() const noexcept { return type_weights_; }

  GroupCountOutput group_count();
  Var slot_embedding(const Span& span);
  Var action_logit(const Span& span);
  Var location_logits(Var action_embedding);
  Var object_logits(Var action_embedding, Var location_embedding);
  // Stand-in for E_L when the location slot is empty.
  Var empty_location_embedding();

 private:
  Tape* tape_;
  const SlfModel* model_;
  std::size_t length_;
  Var embeddings_;
  Var sentence_;
  AttentionContext attention_;
  SpanEncoder spans_;
  Var summary_action_;
  Var summary_location_;
  Var summary_object_;
  std::vector<Var> type_weights_;
};

}  // namespace slfnet
