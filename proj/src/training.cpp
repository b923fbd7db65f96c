#include "slfnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slfnet/errors.hpp"
#include "slfnet/rng.hpp"

namespace slfnet {

void TrainConfig::validate() const {
  model.validate();
  if (epochs == 0) throw DomainError("epochs must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw DomainError("learning_rate must be finite and non-negative");
  for (double w : {lambda.count, lambda.action, lambda.location, lambda.object})
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("loss weights must be finite and non-negative");
}

namespace {

// Target over L+1 pointer positions.
Tensor pointer_target(std::size_t length, const OptSpan& gold) {
  Tensor t(Shape{length + 1}, 0.0);
  if (!gold) {
    t[length] = 1.0;
    return t;
  }
  const double w = 1.0 / static_cast<double>(gold->length());
  for (std::size_t i = gold->start; i <= gold->end; ++i) t[i] = w;
  return t;
}

Var cross_entropy(Tape& tape, Var logits, const Tensor& target) {
  return ad::scale(ad::sum(ad::mul(ad::log_softmax(logits), tape.constant(target))), -1.0);
}

}  // namespace

Var compute_loss(Tape& tape, const SlfModel& model, const NLCExample& example,
                 const LossWeights& weights) {
  const std::size_t k = example.groups.size();
  if (k > model.config.k_max)
    throw DataError("example '" + example.id + "' has " + std::to_string(k) +
                    " groups, more than k_max " + std::to_string(model.config.k_max));
  SentenceForward fwd(tape, model, example.tokens, example.dep_heads);
  const std::size_t len = fwd.length();
  std::vector<Var> terms;

  if (weights.count > 0.0) {
    Var logp = ad::log_softmax(fwd.group_count().logits);
    terms.push_back(ad::scale(ad::sum(ad::slice(logp, k, 1)), -weights.count));
  }

  if (weights.action > 0.0) {
    const auto candidates = enumerate_action_candidates(len, model.config.max_span);
    std::vector<Var> logits;
    logits.reserve(candidates.size());
    Tensor signs(Shape{candidates.size()}, -1.0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      logits.push_back(fwd.action_logit(candidates[c]));
      for (const auto& g : example.groups)
        if (g.action == candidates[c]) signs[c] = 1.0;
    }
    // -log σ(z) for gold spans, -log σ(-z) = -log(1 - σ(z)) otherwise.
    Var z = ad::concat(std::span<const Var>(logits), 0);
    Var ll = ad::sum(ad::log_sigmoid(ad::mul(z, tape.constant(std::move(signs)))));
    terms.push_back(ad::scale(ll, -weights.action / static_cast<double>(candidates.size())));
  }

  if (weights.location > 0.0 || weights.object > 0.0) {
    for (const auto& g : example.groups) {
      Var ea = fwd.slot_embedding(g.action);
      if (weights.location > 0.0)
        terms.push_back(ad::scale(
            cross_entropy(tape, fwd.location_logits(ea), pointer_target(len, g.location)),
            weights.location));
      if (weights.object > 0.0) {
        Var el = g.location ? fwd.slot_embedding(*g.location) : fwd.empty_location_embedding();
        terms.push_back(ad::scale(
            cross_entropy(tape, fwd.object_logits(ea, el), pointer_target(len, g.object)),
            weights.object));
      }
    }
  }

  if (terms.empty()) return tape.constant(Tensor::scalar(0.0));
  Var total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = ad::add(total, terms[i]);
  return total;
}

Adam::Adam(const ParamStore& params, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(zero_gradients(params)),
      v_(zero_gradients(params)) {}

void Adam::step(ParamStore& params, const Gradients& grads) {
  if (grads.size() != params.size())
    throw ContractError("Adam::step: gradient count differs from parameter count");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (ParamId id = 0; id < params.size(); ++id) {
    auto p = params.value(id).data();
    const auto g = grads[id].data();
    auto m = m_[id].data();
    auto v = v_[id].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

TrainResult train(const std::vector<NLCExample>& train_set, const std::vector<NLCExample>& dev_set,
                  const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw DomainError("training set is empty");
  for (const auto& ex : train_set) validate_example(ex, config.model.k_max);

  TrainResult result{SlfModel::create(config.model, build_vocabulary(train_set), config.seed), {}, 0};
  SlfModel& model = result.model;
  if (options.embeddings) set_embeddings(model, *options.embeddings);

  Adam adam(model.params, config.learning_rate);
  Xorshift64Star order_rng(config.seed ^ 0x6a09e667f3bcc909ULL);
  std::vector<std::size_t> order(train_set.size());
  Gradients grads = zero_gradients(model.params);
  SlfModel best = model;
  double best_accuracy = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const NLCExample& ex = train_set[idx];
      for (auto& g : grads) std::fill(g.data().begin(), g.data().end(), 0.0);
      Tape tape(&model.params);
      Var loss = compute_loss(tape, model, ex, config.lambda);
      const double value = loss.value().item();
      if (!std::isfinite(value))
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + " on example '" +
                              ex.id + "'");
      tape.backward(loss, grads);
      for (const auto& g : grads)
        if (!g.all_finite())
          throw DivergenceError("non-finite gradient at epoch " + std::to_string(epoch) +
                                " on example '" + ex.id + "'");
      adam.step(model.params, grads);
      loss_sum += value;
    }

    EpochLog log{epoch, loss_sum / static_cast<double>(train_set.size()), 0.0, 0.0};
    if (!dev_set.empty()) {
      const MetricsReport dev = evaluate(model, dev_set);
      log.dev_accuracy = dev.accuracy;
      log.dev_f = dev.f_score;
    }
    result.log.push_back(log);
    if (options.on_epoch) options.on_epoch(log);
    if (dev_set.empty() || log.dev_accuracy > best_accuracy) {
      best_accuracy = log.dev_accuracy;
      best = model;
      result.best_epoch = epoch;
    }
  }
  model = std::move(best);
  return result;
}

}  // namespace slfnet
