#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slfnet/tensor.hpp"

namespace slfnet {

using ParamId = std::uint32_t;

/// Named trainable tensors, addressed by insertion-ordered ids.
class ParamStore {
 public:
  ParamId add(std::string name, Tensor value);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t total_size() const noexcept;
  const std::string& name(ParamId id) const { return names_.at(id); }
  Tensor& value(ParamId id) { return values_.at(id); }
  const Tensor& value(ParamId id) const { return values_.at(id); }
  std::optional<ParamId> find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
  std::unordered_map<std::string, ParamId> index_;
};

// One gradient tensor per ParamId, same shapes as the store.
using Gradients = std::vector<Tensor>;

Gradients zero_gradients(const ParamStore& store);

}  // namespace slfnet
