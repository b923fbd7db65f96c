#include "slfnet/attention.hpp"

#include <cmath>

#include "slfnet/errors.hpp"

namespace slfnet {

MultiHeadParams add_multi_head(ParamStore& store, const std::string& prefix, std::size_t d,
                               std::size_t num_heads, Xorshift64Star& rng) {
  if (num_heads == 0) throw DomainError("multi-head attention needs at least one head");
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  MultiHeadParams p;
  for (std::size_t i = 0; i < num_heads; ++i) {
    const std::string name = prefix + ".head" + std::to_string(i);
    AttentionHeadParams h;
    h.W_Q = store.add(name + ".W_Q", uniform_tensor(Shape{d, d}, bound, rng));
    h.W_K = store.add(name + ".W_K", uniform_tensor(Shape{d, d}, bound, rng));
    p.heads.push_back(h);
  }
  p.W_h = store.add(prefix + ".W_h",
                    Tensor(Shape{num_heads, 1}, 1.0 / static_cast<double>(num_heads)));
  return p;
}

AttentionContext::AttentionContext(Tape& tape, Var sentence, const MultiHeadParams& params,
                                   AttentionMode mode)
    : tape_(&tape), sentence_(sentence), params_(&params), mode_(mode) {
  const Tensor& es = sentence.value();
  if (es.rank() != 2 || es.cols() == 0)
    throw DimensionError("attention expects a [d×L] sentence with L >= 1, got " +
                         es.shape().str());
  if (params.heads.empty()) throw DomainError("multi-head attention needs at least one head");
  if (mode == AttentionMode::Learned)
    for (const auto& h : params.heads)
      keys_.push_back(ad::matmul(tape.param(h.W_K), sentence));
}

AttentionResult AttentionContext::head(Var query, std::size_t index) {
  const std::size_t len = sentence_.value().cols();
  Var scores;
  if (mode_ == AttentionMode::ZeroQuery) {
    scores = tape_->constant(Tensor(Shape{len}));
  } else {
    Var q = ad::matmul(tape_->param(params_->heads.at(index).W_Q), query);
    scores = ad::matmul(ad::transpose(keys_.at(index)), q);
  }
  Var weights = ad::softmax(scores);
  return {ad::matmul(sentence_, weights), weights};
}

Var AttentionContext::attend(Var query, std::vector<Var>* weights) {
  std::vector<Var> outputs;
  outputs.reserve(params_->heads.size());
  for (std::size_t i = 0; i < params_->heads.size(); ++i) {
    AttentionResult r = head(query, i);
    outputs.push_back(r.output);
    if (weights) weights->push_back(r.weights);
  }
  const std::size_t d = sentence_.value().rows();
  Var mixed = ad::matmul(ad::stack_columns(outputs), tape_->param(params_->W_h));
  return ad::reshape(mixed, Shape{d});
}

AttentionResult slf_attention(Tape& tape, Var query, Var sentence, const AttentionHeadParams& head,
                              AttentionMode mode) {
  MultiHeadParams single{{head}, 0};
  AttentionContext ctx(tape, sentence, single, mode);
  return ctx.head(query, 0);
}

Var multi_head_slf_attention(Tape& tape, Var query, Var sentence, const MultiHeadParams& params,
                             AttentionMode mode, std::vector<Var>* weights) {
  AttentionContext ctx(tape, sentence, params, mode);
  return ctx.attend(query, weights);
}

}  // namespace slfnet
