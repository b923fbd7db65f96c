#include "slfnet/model.hpp"

#include "slfnet/errors.hpp"

namespace slfnet {

void ModelConfig::validate() const {
  if (d == 0 || d % 2 != 0) throw DomainError("d must be even and positive, got " + std::to_string(d));
  if (num_layers == 0) throw DomainError("num_layers must be at least 1");
  if (heads == 0) throw DomainError("heads must be at least 1");
  if (max_span == 0) throw DomainError("max_span must be at least 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
}

SlfModel SlfModel::create(const ModelConfig& config, Vocabulary vocab, std::uint64_t seed) {
  config.validate();
  SlfModel m;
  m.config = config;
  m.vocab = std::move(vocab);
  Xorshift64Star rng(seed);
  const std::size_t d = config.d;

  Tensor emb = uniform_tensor(Shape{m.vocab.size(), d}, 0.1, rng);
  for (std::size_t j = 0; j < d; ++j) emb.at(Vocabulary::kUnknown, j) = 0.0;
  m.embedding = m.params.add("embedding", std::move(emb));

  m.nlc_encoder = add_dep_fused(m.params, "nlc", d, {config.num_layers, config.interaction}, rng);
  m.slot_encoder = add_bilstm(m.params, "slot", d, d, rng);
  m.attention = add_multi_head(m.params, "attn", d, config.heads, rng);
  m.count_head = add_group_count_head(m.params, "count", d, config.k_max, rng);
  m.action_head = add_action_head(m.params, "action", d, rng);
  m.location_head = add_location_head(m.params, "location", d, rng);
  m.object_head = add_object_head(m.params, "object", d, rng);
  return m;
}

void set_embeddings(SlfModel& model, const EmbeddingTable& table) {
  if (table.vocab.tokens() != model.vocab.tokens())
    throw DataError("embedding table vocabulary differs from the model vocabulary");
  Tensor& dst = model.params.value(model.embedding);
  if (!(table.vectors.shape() == dst.shape()))
    throw DimensionError("embedding table shape " + table.vectors.shape().str() +
                         " differs from model shape " + dst.shape().str());
  dst = table.vectors;
}

namespace {

Var encode_sentence(Tape& tape, const SlfModel& model, Var embeddings,
                    std::span<const std::size_t> heads) {
  return dep_fused_encode(tape, embeddings, heads,
                          {model.config.num_layers, model.config.interaction}, model.nlc_encoder);
}

}  // namespace

SentenceForward::SentenceForward(Tape& tape, const SlfModel& model,
                                 const std::vector<std::string>& tokens,
                                 std::span<const std::size_t> heads)
    : tape_(&tape),
      model_(&model),
      length_(tokens.size()),
      embeddings_(embed_tokens(tape, model.embedding, model.vocab, tokens)),
      sentence_(encode_sentence(tape, model, embeddings_, heads)),
      attention_(tape, sentence_, model.attention, model.config.attention),
      spans_(tape, model.slot_encoder, embeddings_) {
  summary_action_ = attention_.attend(tape.param(model.count_head.q_A), &type_weights_);
  summary_location_ = attention_.attend(tape.param(model.count_head.q_L), &type_weights_);
  summary_object_ = attention_.attend(tape.param(model.count_head.q_O), &type_weights_);
}

GroupCountOutput SentenceForward::group_count() {
  return predict_group_count(*tape_, model_->count_head, summary_action_, summary_location_,
                             summary_object_);
}

Var SentenceForward::slot_embedding(const Span& span) { return spans_.encode(span.start, span.end); }

Var SentenceForward::action_logit(const Span& span) {
  Var ea = slot_embedding(span);
  Var summary = attention_.attend(ea);
  return slfnet::action_logit(*tape_, model_->action_head, ea, summary);
}

Var SentenceForward::location_logits(Var action_embedding) {
  return slfnet::location_logits(*tape_, model_->location_head, sentence_, action_embedding,
                                 summary_location_);
}

Var SentenceForward::object_logits(Var action_embedding, Var location_embedding) {
  return slfnet::object_logits(*tape_, model_->object_head, sentence_, action_embedding,
                               location_embedding, summary_object_);
}

Var SentenceForward::empty_location_embedding() {
  return tape_->param(model_->location_head.e_nil);
}

}  // namespace slfnet
