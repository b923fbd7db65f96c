#pragma once

// Group-count classifier, action scorer and the two pointer heads.

#include <cstddef>
#include <string>
#include <vector>

#include "slfnet/attention.hpp"
#include "slfnet/params.hpp"
#include "slfnet/rng.hpp"
#include "slfnet/tape.hpp"
#include "slfnet/types.hpp"

namespace slfnet {

struct GroupCountParams {
  ParamId W1 = 0;  // [(k_max+1)×d]
  ParamId W2 = 0;  // [d×d], applied to E_{S|A}
  ParamId W3 = 0;  // [d×d], applied to E_{S|L}
  ParamId W4 = 0;  // [d×d], applied to E_{S|O}
  // Trainable type queries that produce E_{S|A}, E_{S|L}, E_{S|O} before any slot is known.
  ParamId q_A = 0;
  ParamId q_L = 0;
  ParamId q_O = 0;
};

struct ActionHeadParams {
  ParamId W_A = 0;  // [d×1]
  ParamId W_a = 0;  // [d×d]
  ParamId W_s = 0;  // [d×d]
};

struct LocationHeadParams {
  ParamId W_L = 0;  // [d×1]
  ParamId W1 = 0;   // [d×d], token column
  ParamId W2 = 0;   // [d×d], action embedding
  ParamId W3 = 0;   // [d×d], E_{S|L}
  ParamId e_nil = 0;  // [d], sentinel column scored at position L
};

struct ObjectHeadParams {
  ParamId W_O = 0;  // [d×1]
  ParamId W1 = 0;
  ParamId W2 = 0;
  ParamId W3 = 0;  // location embedding
  ParamId W4 = 0;  // E_{S|O}
  ParamId e_nil = 0;
};

GroupCountParams add_group_count_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t k_max, Xorshift64Star& rng);
ActionHeadParams add_action_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                 Xorshift64Star& rng);
LocationHeadParams add_location_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                     Xorshift64Star& rng);
ObjectHeadParams add_object_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                 Xorshift64Star& rng);

struct GroupCountOutput {
  Var logits;  // [k_max+1]
  Var probs;   // softmax(logits)
  std::size_t k = 0;
};

// probs = softmax(W1 tanh(W2 E_{S|A} + W3 E_{S|L} + W4 E_{S|O})); k = argmax, lowest index on ties.
GroupCountOutput predict_group_count(Tape& tape, const GroupCountParams& p, Var summary_action,
                                     Var summary_location, Var summary_object);

// All contiguous spans of 1..max_span tokens, ordered by (start, end).
std::vector<Span> enumerate_action_candidates(std::size_t length, std::size_t max_span);

// z = W_Aᵀ tanh(W_a E_A + W_s E_{S|A}) as a [1] vector; the score is sigmoid(z).
Var action_logit(Tape& tape, const ActionHeadParams& p, Var slot_embedding, Var summary);

// Pointer logits over the L sentence columns plus the sentinel at index L.
Var location_logits(Tape& tape, const LocationHeadParams& p, Var sentence, Var action_embedding,
                    Var summary_location);
Var object_logits(Tape& tape, const ObjectHeadParams& p, Var sentence, Var action_embedding,
                  Var location_embedding, Var summary_object);

// Lowest index among the maxima.
std::size_t argmax(const Tensor& v);

}  // namespace slfnet
