#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrd/error.hpp"

namespace lrd {

using Shape = std::vector<std::size_t>;
using complex = std::complex<double>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape);

/// Row-major strides (last index varies fastest).
inline std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) strides[k - 1] = strides[k] * shape[k];
  return strides;
}

/// Dense N-order array stored row-major, last index fastest.
///
/// The shape is validated on construction: at least one mode, every extent
/// positive, and the payload length equal to the product of the extents.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : shape_{1}, data_(1, T{}) {}

  explicit BasicTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(shape_size(shape_), T{});
  }

  BasicTensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_size(shape_)) {
      throw DomainError("tensor payload has " + std::to_string(data_.size()) +
                        " elements, shape " + shape_to_string(shape_) + " needs " +
                        std::to_string(shape_size(shape_)));
    }
  }

  static BasicTensor filled(Shape shape, T value) {
    BasicTensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  std::size_t offset(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw DomainError("index order does not match tensor order");
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
      if (index[k] >= shape_[k]) throw DomainError("tensor index out of range");
      off = off * shape_[k] + index[k];
    }
    return off;
  }

  T& at(std::initializer_list<std::size_t> index) {
    return data_[offset(std::span(index.begin(), index.size()))];
  }
  const T& at(std::initializer_list<std::size_t> index) const {
    return data_[offset(std::span(index.begin(), index.size()))];
  }
  T& at(std::span<const std::size_t> index) { return data_[offset(index)]; }
  const T& at(std::span<const std::size_t> index) const { return data_[offset(index)]; }

  bool operator==(const BasicTensor& other) const = default;

 private:
  static void check_shape(const Shape& shape) {
    if (shape.empty()) throw DomainError("tensor order must be at least 1");
    for (std::size_t e : shape) {
      if (e == 0) throw DomainError("tensor extents must be positive, got " + shape_to_string(shape));
    }
  }

  Shape shape_;
  std::vector<T> data_;
};

using DenseTensor = BasicTensor<double>;
using ComplexTensor = BasicTensor<complex>;

/// Advances a row-major multi-index; returns false after the last element.
inline bool next_index(std::vector<std::size_t>& index, const Shape& shape) {
  for (std::size_t k = shape.size(); k-- > 0;) {
    if (++index[k] < shape[k]) return true;
    index[k] = 0;
  }
  return false;
}

ComplexTensor to_complex(const DenseTensor& t);
DenseTensor real_part(const ComplexTensor& t);
double max_abs_imag(const ComplexTensor& t);

double frobenius_norm_squared(const DenseTensor& t);
double frobenius_norm_squared(const ComplexTensor& t);

}  // namespace lrd
