#include "slfnet/params.hpp"

#include "slfnet/errors.hpp"

namespace slfnet {

ParamId ParamStore::add(std::string name, Tensor value) {
  if (index_.contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  const auto id = static_cast<ParamId>(values_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return id;
}

std::size_t ParamStore::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

std::optional<ParamId> ParamStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Gradients zero_gradients(const ParamStore& store) {
  Gradients g;
  g.reserve(store.size());
  for (ParamId id = 0; id < store.size(); ++id) g.emplace_back(store.value(id).shape());
  return g;
}

}  // namespace slfnet
