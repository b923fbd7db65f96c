#pragma once

// Slot-query attention over encoded sentence columns, single- and multi-head.
//
// One head scores every column i of E_S against a query as
//   v_i = (W_Q q)ᵀ (W_K E_S[:, i])
// without a 1/sqrt(d) factor, normalizes with softmax and returns E_S·a_w.
// The multi-head form stacks the h head outputs as a [d×h] matrix and mixes
// them with W_h [h×1].

#include <cstddef>
#include <string>
#include <vector>

#include "slfnet/params.hpp"
#include "slfnet/rng.hpp"
#include "slfnet/tape.hpp"

namespace slfnet {

struct AttentionHeadParams {
  ParamId W_Q = 0;  // [d×d]
  ParamId W_K = 0;  // [d×d]
};

struct MultiHeadParams {
  std::vector<AttentionHeadParams> heads;
  ParamId W_h = 0;  // [h×1]
};

// ZeroQuery pins the query projection to zero: every head attends uniformly.
enum class AttentionMode { Learned, ZeroQuery };

// W_Q and W_K uniform in [-1/sqrt(d), 1/sqrt(d)]; W_h starts at 1/h per head.
MultiHeadParams add_multi_head(ParamStore& store, const std::string& prefix, std::size_t d,
                               std::size_t num_heads, Xorshift64Star& rng);

struct AttentionResult {
  Var output;   // [d]
  Var weights;  // [L]
};

/// Attention over one sentence. Key projections W_K·E_S are computed once per head.
class AttentionContext {
 public:
  AttentionContext(Tape& tape, Var sentence, const MultiHeadParams& params, AttentionMode mode);

  AttentionResult head(Var query, std::size_t index);
  // Multi-head output; per-head weights are appended to `weights` when given.
  Var attend(Var query, std::vector<Var>* weights = nullptr);

  Var sentence() const noexcept { return sentence_; }
  std::size_t num_heads() const noexcept { return params_->heads.size(); }

 private:
  Tape* tape_;
  Var sentence_;
  const MultiHeadParams* params_;
  AttentionMode mode_;
  std::vector<Var> keys_;
};

AttentionResult slf_attention(Tape& tape, Var query, Var sentence, const AttentionHeadParams& head,
                              AttentionMode mode = AttentionMode::Learned);

Var multi_head_slf_attention(Tape& tape, Var query, Var sentence, const MultiHeadParams& params,
                             AttentionMode mode = AttentionMode::Learned,
                             std::vector<Var>* weights = nullptr);

}  // namespace slfnet
