#include "slfnet/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "slfnet/errors.hpp"

namespace slfnet {

Shape::Shape(std::initializer_list<std::size_t> extents) {
  if (extents.size() > kMaxRank)
    throw DimensionError("rank " + std::to_string(extents.size()) + " exceeds maximum of 4");
  for (std::size_t e : extents) dims_[rank_++] = e;
}

std::size_t Shape::numel() const noexcept {
  std::size_t n = 1;
  for (std::size_t i = 0; i < rank_; ++i) n *= dims_[i];
  return n;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) os << 'x';
    os << dims_[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.numel())
    throw DimensionError("tensor of shape " + shape_.str() + " needs " +
                         std::to_string(shape_.numel()) + " values, got " +
                         std::to_string(data_.size()));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

double Tensor::item() const {
  if (data_.size() != 1) throw ContractError("item() on tensor of shape " + shape_.str());
  return data_[0];
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool bit_identical(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace slfnet
