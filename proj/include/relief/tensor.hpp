#ifndef RELIEF_TENSOR_HPP
#define RELIEF_TENSOR_HPP

// Dense row-major n-d value storage for the layer toolkit. Scalar type is a
// template parameter: float for training, double for finite-difference
// gradient checks.

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace relief {

template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;

  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), T(0));
  }

  Tensor(std::initializer_list<int> s) : Tensor(std::vector<int>(s)) {}

  static std::size_t numel_of(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int d : s) {
      if (d <= 0) throw std::invalid_argument("Tensor: extent must be positive");
      n *= std::size_t(d);
    }
    return n;
  }

  std::size_t numel() const { return data.size(); }

  int dim(int i) const { return shape[std::size_t(i)]; }
  int ndim() const { return int(shape.size()); }

  T& operator[](std::size_t i) { return data[i]; }
  T operator[](std::size_t i) const { return data[i]; }

  T& at3(int c, int y, int x) {
    return data[(std::size_t(c) * shape[1] + y) * shape[2] + x];
  }
  T at3(int c, int y, int x) const {
    return data[(std::size_t(c) * shape[1] + y) * shape[2] + x];
  }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(T(0)); }

  Tensor reshaped(std::vector<int> s) const {
    if (numel_of(s) != numel())
      throw std::invalid_argument("Tensor::reshaped: element count mismatch");
    Tensor out;
    out.shape = std::move(s);
    out.data = data;
    return out;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

}  // namespace relief

#endif  // RELIEF_TENSOR_HPP
