#include "dcrm/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "dcrm/errors.hpp"

namespace dcrm {

std::string Shape::str() const {
  return "[" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
         std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), values_(shape.size(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), values_(values.begin(), values.end()) {
  if (values_.size() != shape_.size())
    throw ShapeError("tensor data has " + std::to_string(values_.size()) + " values, shape " +
                     shape_.str() + " needs " + std::to_string(shape_.size()));
}

Tensor Tensor::from_batch(const FieldBatch& batch) {
  const auto v = batch.values();
  Tensor t({batch.n(), batch.channels(), batch.side(), batch.side()});
  std::copy(v.begin(), v.end(), t.values_.begin());
  return t;
}

FieldBatch Tensor::to_batch() const {
  if (shape_.h != shape_.w) throw ShapeError("tensor " + shape_.str() + " is not square");
  FieldBatch out(shape_.n, shape_.c, shape_.h);
  std::copy(values_.begin(), values_.end(), out.values().begin());
  return out;
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void Tensor::add(const Tensor& other) {
  if (!(other.shape_ == shape_))
    throw ShapeError("cannot add " + other.shape_.str() + " to " + shape_.str());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace dcrm
