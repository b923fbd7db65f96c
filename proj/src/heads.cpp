#include "slfnet/heads.hpp"

#include <cmath>

#include "slfnet/errors.hpp"

namespace slfnet {
namespace {

double bound_for(std::size_t d) { return 1.0 / std::sqrt(static_cast<double>(d)); }

ParamId square(ParamStore& s, const std::string& name, std::size_t d, Xorshift64Star& rng) {
  return s.add(name, uniform_tensor(Shape{d, d}, bound_for(d), rng));
}

ParamId column_vec(ParamStore& s, const std::string& name, std::size_t d, Xorshift64Star& rng) {
  return s.add(name, uniform_tensor(Shape{d, 1}, bound_for(d), rng));
}

ParamId vec(ParamStore& s, const std::string& name, std::size_t d, Xorshift64Star& rng) {
  return s.add(name, uniform_tensor(Shape{d}, bound_for(d), rng));
}

// [1×d]·[d×n] → [n]
Var project_out(Tape& tape, ParamId w, Var hidden) {
  Var row = ad::transpose(tape.param(w));
  Var scores = ad::matmul(row, hidden);
  return ad::reshape(scores, Shape{scores.value().size()});
}

}  // namespace

GroupCountParams add_group_count_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t k_max, Xorshift64Star& rng) {
  GroupCountParams p;
  p.W1 = store.add(prefix + ".W1", uniform_tensor(Shape{k_max + 1, d}, bound_for(d), rng));
  p.W2 = square(store, prefix + ".W2", d, rng);
  p.W3 = square(store, prefix + ".W3", d, rng);
  p.W4 = square(store, prefix + ".W4", d, rng);
  p.q_A = vec(store, prefix + ".q_A", d, rng);
  p.q_L = vec(store, prefix + ".q_L", d, rng);
  p.q_O = vec(store, prefix + ".q_O", d, rng);
  return p;
}

ActionHeadParams add_action_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                 Xorshift64Star& rng) {
  ActionHeadParams p;
  p.W_A = column_vec(store, prefix + ".W_A", d, rng);
  p.W_a = square(store, prefix + ".W_a", d, rng);
  p.W_s = square(store, prefix + ".W_s", d, rng);
  return p;
}

LocationHeadParams add_location_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                     Xorshift64Star& rng) {
  LocationHeadParams p;
  p.W_L = column_vec(store, prefix + ".W_L", d, rng);
  p.W1 = square(store, prefix + ".W1", d, rng);
  p.W2 = square(store, prefix + ".W2", d, rng);
  p.W3 = square(store, prefix + ".W3", d, rng);
  p.e_nil = vec(store, prefix + ".e_nil", d, rng);
  return p;
}

ObjectHeadParams add_object_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                 Xorshift64Star& rng) {
  ObjectHeadParams p;
  p.W_O = column_vec(store, prefix + ".W_O", d, rng);
  p.W1 = square(store, prefix + ".W1", d, rng);
  p.W2 = square(store, prefix + ".W2", d, rng);
  p.W3 = square(store, prefix + ".W3", d, rng);
  p.W4 = square(store, prefix + ".W4", d, rng);
  p.e_nil = vec(store, prefix + ".e_nil", d, rng);
  return p;
}

std::size_t argmax(const Tensor& v) {
  if (v.size() == 0) throw DomainError("argmax of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

GroupCountOutput predict_group_count(Tape& tape, const GroupCountParams& p, Var summary_action,
                                     Var summary_location, Var summary_object) {
  Var mix = ad::add(ad::add(ad::matmul(tape.param(p.W2), summary_action),
                            ad::matmul(tape.param(p.W3), summary_location)),
                    ad::matmul(tape.param(p.W4), summary_object));
  GroupCountOutput out;
  out.logits = ad::matmul(tape.param(p.W1), ad::tanh(mix));
  out.probs = ad::softmax(out.logits);
  out.k = argmax(out.probs.value());
  return out;
}

std::vector<Span> enumerate_action_candidates(std::size_t length, std::size_t max_span) {
  if (max_span == 0) throw DomainError("max_span must be at least 1");
  std::vector<Span> spans;
  for (std::size_t s = 0; s < length; ++s)
    for (std::size_t e = s; e < length && e - s + 1 <= max_span; ++e) spans.push_back({s, e});
  return spans;
}

Var action_logit(Tape& tape, const ActionHeadParams& p, Var slot_embedding, Var summary) {
  Var hidden = ad::tanh(ad::add(ad::matmul(tape.param(p.W_a), slot_embedding),
                                ad::matmul(tape.param(p.W_s), summary)));
  return ad::matmul(ad::transpose(tape.param(p.W_A)), hidden);
}

Var location_logits(Tape& tape, const LocationHeadParams& p, Var sentence, Var action_embedding,
                    Var summary_location) {
  const std::size_t d = sentence.value().rows();
  Var columns = ad::concat({sentence, ad::reshape(tape.param(p.e_nil), Shape{d, 1})}, 1);
  Var shared = ad::add(ad::matmul(tape.param(p.W2), action_embedding),
                       ad::matmul(tape.param(p.W3), summary_location));
  Var hidden = ad::tanh(ad::add_to_columns(ad::matmul(tape.param(p.W1), columns), shared));
  return project_out(tape, p.W_L, hidden);
}

Var object_logits(Tape& tape, const ObjectHeadParams& p, Var sentence, Var action_embedding,
                  Var location_embedding, Var summary_object) {
  const std::size_t d = sentence.value().rows();
  Var columns = ad::concat({sentence, ad::reshape(tape.param(p.e_nil), Shape{d, 1})}, 1);
  Var shared = ad::add(ad::add(ad::matmul(tape.param(p.W2), action_embedding),
                               ad::matmul(tape.param(p.W3), location_embedding)),
                       ad::matmul(tape.param(p.W4), summary_object));
  Var hidden = ad::tanh(ad::add_to_columns(ad::matmul(tape.param(p.W1), columns), shared));
  return project_out(tape, p.W_O, hidden);
}

}  // namespace slfnet
