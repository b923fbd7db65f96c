#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slfnet/data.hpp"
#include "slfnet/metrics.hpp"
#include "slfnet/model.hpp"
#include "slfnet/params.hpp"
#include "slfnet/tape.hpp"

namespace slfnet {

struct LossWeights {
  double count = 1.0;
  double action = 1.0;
  double location = 1.0;
  double object = 1.0;
};

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 0.001;
  std::size_t epochs = 25;
  std::uint64_t seed = 7;
  LossWeights lambda;

  void validate() const;
};

// λ_count·CE(class probs, gold k)
// + λ_action·mean BCE over all action candidates (gold action spans positive)
// + λ_loc·Σ_g CE(location pointer, target) + λ_obj·Σ_g CE(object pointer, target).
// Pointer targets are uniform over the gold span, or one-hot on the sentinel
// when the slot is empty. Location and object heads see the gold action and
// gold location spans. Throws DataError when the gold group count exceeds k_max.
Var compute_loss(Tape& tape, const SlfModel& model, const NLCExample& example,
                 const LossWeights& weights);

/// Adam with per-example steps.
class Adam {
 public:
  Adam(const ParamStore& params, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(ParamStore& params, const Gradients& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  Gradients m_;
  Gradients v_;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean training loss
  double dev_accuracy = 0.0;
  double dev_f = 0.0;
};

struct TrainResult {
  SlfModel model;  // parameters of the best-dev-accuracy epoch (earliest on ties)
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

struct TrainOptions {
  // Replaces the random embedding initialization; vocabulary must match.
  const EmbeddingTable* embeddings = nullptr;
  std::function<void(const EpochLog&)> on_epoch;
};

// Vocabulary comes from the training examples. Deterministic given inputs and
// config. Throws DivergenceError if any example loss is non-finite.
TrainResult train(const std::vector<NLCExample>& train_set, const std::vector<NLCExample>& dev_set,
                  const TrainConfig& config, const TrainOptions& options = {});

}  // namespace slfnet
