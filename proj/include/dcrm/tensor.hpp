#pragma once

#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "dcrm/grid.hpp"

namespace dcrm {

/// Allocator with 64-byte alignment. Vectorized kernels peel differently
/// depending on where a buffer starts, which changes the order of floating
/// point sums; a fixed alignment keeps repeated runs bit-identical.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AlignedBuffer = std::vector<double, AlignedAllocator<double>>;

/// Extents of a rank-4 [n, c, h, w] tensor.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t size() const noexcept { return n * c * h * w; }
  std::size_t plane() const noexcept { return h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense row-major rank-4 tensor of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor from_batch(const FieldBatch& batch);
  /// Requires h == w.
  FieldBatch to_batch() const;

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return values_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }
  double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return values_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }

  void fill(double v);
  /// this += other (same shape).
  void add(const Tensor& other);
  bool all_finite() const noexcept;

 private:
  Shape shape_;
  AlignedBuffer values_;
};

}  // namespace dcrm
