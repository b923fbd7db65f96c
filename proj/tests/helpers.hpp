#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slfnet/data.hpp"
#include "slfnet/model.hpp"
#include "slfnet/rng.hpp"
#include "slfnet/tensor.hpp"

namespace testing {

inline slfnet::Tensor random_tensor(slfnet::Shape shape, std::uint64_t seed, double bound = 1.0) {
  slfnet::Xorshift64Star rng(seed);
  return slfnet::uniform_tensor(shape, bound, rng);
}

// Integer-valued entries in [-5, 5].
inline slfnet::Tensor integer_tensor(slfnet::Shape shape, std::uint64_t seed) {
  slfnet::Xorshift64Star rng(seed);
  slfnet::Tensor t(shape);
  for (double& v : t.data()) v = static_cast<double>(rng.below(11)) - 5.0;
  return t;
}

inline double max_abs_diff(const slfnet::Tensor& a, const slfnet::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// "turn on the light in the kitchen": one group, every slot filled.
inline slfnet::NLCExample kitchen_example() {
  slfnet::NLCExample ex;
  ex.id = "kitchen";
  ex.tokens = {"turn", "on", "the", "light", "in", "the", "kitchen"};
  ex.dep_heads = {0, 0, 3, 0, 6, 6, 0};
  ex.groups = {{{0, 1}, slfnet::Span{6, 6}, slfnet::Span{3, 3}}};
  return ex;
}

inline slfnet::SlfModel small_model(const std::vector<slfnet::NLCExample>& examples, std::size_t d = 8,
                                    std::uint64_t seed = 3) {
  slfnet::ModelConfig c;
  c.d = d;
  return slfnet::SlfModel::create(c, slfnet::build_vocabulary(examples), seed);
}

}  // namespace testing
