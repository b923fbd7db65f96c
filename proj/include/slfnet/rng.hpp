#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "slfnet/tensor.hpp"

namespace slfnet {

/// xorshift64* generator. Fixed algorithm so every platform draws the same stream.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) noexcept {
    // splitmix64 scramble so that small or zero seeds still give a good state
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    state_ = z ? z : 0x2545F4914F6CDD1DULL;
  }

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be > 0.
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

// Tensor with entries drawn uniformly from [-bound, bound], row-major order.
inline Tensor uniform_tensor(Shape shape, double bound, Xorshift64Star& rng) {
  Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace slfnet
