#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "collasprite/common.hpp"

namespace collasprite {

// Dense row-major tensor. Rank-3 (height, width, channels) is the common case
// for images and feature maps; flat views back the GEMM paths.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(numel_of(shape_), T(0));
  }

  Tensor(int h, int w, int c) : Tensor(std::vector<int>{h, w, c}) {}

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  int height() const { return shape_[0]; }
  int width() const { return shape_[1]; }
  int channels() const { return shape_[2]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  T& operator()(int y, int x, int c) {
    return data_[(static_cast<size_t>(y) * shape_[1] + x) * shape_[2] + c];
  }
  const T& operator()(int y, int x, int c) const {
    return data_[(static_cast<size_t>(y) * shape_[1] + x) * shape_[2] + c];
  }

  void set_zero() { std::fill(data_.begin(), data_.end(), T(0)); }
  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Re-dimensions in place, keeping vector capacity. Contents are
  // unspecified afterwards; callers overwrite. Hot paths reuse tensors
  // across layers of different sizes without reallocating.
  void reshape(std::vector<int> shape) {
    size_t n = numel_of(shape);
    shape_ = std::move(shape);
    if (data_.size() != n) data_.resize(n);
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

  static size_t numel_of(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
      require(d >= 0, "tensor: negative dimension");
      n *= static_cast<size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

template <typename T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatrixRM<T>>;
template <typename T>
using ConstMapRM = Eigen::Map<const MatrixRM<T>>;

// C (m x n) = A (m x k) * B (k x n), optionally accumulating.
template <typename T>
void matmul(T* c, const T* a, const T* b, int m, int k, int n, bool accumulate = false) {
  MapRM<T> C(c, m, n);
  ConstMapRM<T> A(a, m, k);
  ConstMapRM<T> B(b, k, n);
  if (accumulate)
    C.noalias() += A * B;
  else
    C.noalias() = A * B;
}

// C (m x n) = A^T (m x k, stored k x m) * B (k x n).
template <typename T>
void matmul_at(T* c, const T* a, const T* b, int m, int k, int n, bool accumulate = false) {
  MapRM<T> C(c, m, n);
  ConstMapRM<T> A(a, k, m);
  ConstMapRM<T> B(b, k, n);
  if (accumulate)
    C.noalias() += A.transpose() * B;
  else
    C.noalias() = A.transpose() * B;
}

// C (m x n) = A (m x k) * B^T (k x n, stored n x k).
template <typename T>
void matmul_bt(T* c, const T* a, const T* b, int m, int k, int n, bool accumulate = false) {
  MapRM<T> C(c, m, n);
  ConstMapRM<T> A(a, m, k);
  ConstMapRM<T> B(b, n, k);
  if (accumulate)
    C.noalias() += A * B.transpose();
  else
    C.noalias() = A * B.transpose();
}

template <typename T>
void concat_channels(const std::vector<const Tensor<T>*>& parts, Tensor<T>& out) {
  int h = parts.front()->height();
  int w = parts.front()->width();
  int c_total = 0;
  for (const auto* p : parts) {
    require(p->height() == h && p->width() == w, "concat: spatial mismatch");
    c_total += p->channels();
  }
  if (out.rank() != 3 || out.height() != h || out.width() != w || out.channels() != c_total)
    out = Tensor<T>(h, w, c_total);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      T* dst = &out(y, x, 0);
      for (const auto* p : parts) {
        const T* src = &(*p)(y, x, 0);
        std::copy(src, src + p->channels(), dst);
        dst += p->channels();
      }
    }
  }
}

// Scatter of concat_channels: adds the matching channel span of `d_out` into
// each destination gradient. `parts[i]` may be null to drop that span;
// `widths[i]` always gives the span's channel count.
template <typename T>
void split_channels_add(const Tensor<T>& d_out, const std::vector<Tensor<T>*>& parts,
                        const std::vector<int>& widths) {
  require(parts.size() == widths.size(), "split: parts/widths mismatch");
  int h = d_out.height();
  int w = d_out.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const T* src = &d_out(y, x, 0);
      for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] != nullptr) {
          T* dst = &(*parts[i])(y, x, 0);
          for (int c = 0; c < widths[i]; ++c) dst[c] += src[c];
        }
        src += widths[i];
      }
    }
  }
}

}  // namespace collasprite
