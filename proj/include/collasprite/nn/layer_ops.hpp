#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "collasprite/rng.hpp"
#include "collasprite/tensor.hpp"

namespace collasprite::nn {

// ---------------------------------------------------------------------------
// Flat parameter arena. Networks describe their tensors once in a ParamLayout;
// weights, gradients and optimizer moments are then plain arrays sharing the
// same offsets, which keeps per-worker gradient buffers and serialization
// trivial.
// ---------------------------------------------------------------------------

enum class InitKind { conv_weight, zero, one };

struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  size_t offset = 0;
  size_t count = 0;
  InitKind init = InitKind::zero;
};

class ParamLayout {
 public:
  size_t add(std::string name, std::vector<int> shape, InitKind init) {
    ParamSpec spec;
    spec.name = std::move(name);
    spec.count = 1;
    for (int d : shape) spec.count *= static_cast<size_t>(d);
    spec.shape = std::move(shape);
    spec.offset = total_;
    spec.init = init;
    total_ += spec.count;
    specs_.push_back(spec);
    return specs_.back().offset;
  }

  size_t total() const { return total_; }
  const std::vector<ParamSpec>& specs() const { return specs_; }

 private:
  std::vector<ParamSpec> specs_;
  size_t total_ = 0;
};

// Convolution weights: normal(0, 0.02), the DCGAN-family convention.
template <typename T>
void init_params(const ParamLayout& layout, T* params, Rng& rng) {
  for (const ParamSpec& spec : layout.specs()) {
    T* p = params + spec.offset;
    switch (spec.init) {
      case InitKind::conv_weight:
        for (size_t i = 0; i < spec.count; ++i) p[i] = static_cast<T>(rng.normal(0.0, 0.02));
        break;
      case InitKind::zero:
        std::fill(p, p + spec.count, T(0));
        break;
      case InitKind::one:
        std::fill(p, p + spec.count, T(1));
        break;
    }
  }
}

template <typename T>
void ensure_shape(Tensor<T>& t, int h, int w, int c) {
  if (t.rank() != 3 || t.height() != h || t.width() != w || t.channels() != c)
    t.reshape({h, w, c});
}

template <typename T>
void ensure_shape2(Tensor<T>& t, int rows, int cols) {
  if (t.rank() != 2 || t.dim(0) != rows || t.dim(1) != cols) t.reshape({rows, cols});
}

// ---------------------------------------------------------------------------
// Convolution geometry ("same" padding, TensorFlow convention: for odd total
// padding the extra pixel goes to the bottom/right).
// ---------------------------------------------------------------------------

struct ConvGeom {
  int ih, iw, oh, ow, kernel, stride, pad_top, pad_left;
};

inline ConvGeom same_conv_geom(int ih, int iw, int kernel, int stride) {
  ConvGeom g{};
  g.ih = ih;
  g.iw = iw;
  g.kernel = kernel;
  g.stride = stride;
  g.oh = (ih + stride - 1) / stride;
  g.ow = (iw + stride - 1) / stride;
  int pad_h = std::max((g.oh - 1) * stride + kernel - ih, 0);
  int pad_w = std::max((g.ow - 1) * stride + kernel - iw, 0);
  g.pad_top = pad_h / 2;
  g.pad_left = pad_w / 2;
  return g;
}

// patches: [oh*ow, kernel*kernel*c] with zero padding outside the input.
template <typename T>
void im2col(const ConvGeom& g, const Tensor<T>& x, Tensor<T>& patches) {
  const int c = x.channels();
  const int row_len = g.kernel * g.kernel * c;
  ensure_shape2(patches, g.oh * g.ow, row_len);
  T* out = patches.data();
  for (int oy = 0; oy < g.oh; ++oy) {
    for (int ox = 0; ox < g.ow; ++ox) {
      T* row = out + (static_cast<size_t>(oy) * g.ow + ox) * row_len;
      for (int ky = 0; ky < g.kernel; ++ky) {
        int iy = oy * g.stride - g.pad_top + ky;
        T* dst = row + static_cast<size_t>(ky) * g.kernel * c;
        if (iy < 0 || iy >= g.ih) {
          std::fill(dst, dst + static_cast<size_t>(g.kernel) * c, T(0));
          continue;
        }
        for (int kx = 0; kx < g.kernel; ++kx) {
          int ix = ox * g.stride - g.pad_left + kx;
          if (ix < 0 || ix >= g.iw) {
            std::fill(dst, dst + c, T(0));
          } else {
            const T* src = &x(iy, ix, 0);
            std::copy(src, src + c, dst);
          }
          dst += c;
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-adds patch rows back onto the input plane.
template <typename T>
void col2im_add(const ConvGeom& g, const Tensor<T>& patches, Tensor<T>& x) {
  const int c = x.channels();
  const int row_len = g.kernel * g.kernel * c;
  const T* in = patches.data();
  for (int oy = 0; oy < g.oh; ++oy) {
    for (int ox = 0; ox < g.ow; ++ox) {
      const T* row = in + (static_cast<size_t>(oy) * g.ow + ox) * row_len;
      for (int ky = 0; ky < g.kernel; ++ky) {
        int iy = oy * g.stride - g.pad_top + ky;
        if (iy < 0 || iy >= g.ih) continue;
        const T* src = row + static_cast<size_t>(ky) * g.kernel * c;
        for (int kx = 0; kx < g.kernel; ++kx) {
          int ix = ox * g.stride - g.pad_left + kx;
          if (ix >= 0 && ix < g.iw) {
            T* dst = &x(iy, ix, 0);
            for (int i = 0; i < c; ++i) dst[i] += src[i];
          }
          src += c;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Conv2d: weights [kernel*kernel*in_c, out_c], bias [out_c].
// ---------------------------------------------------------------------------

template <typename T>
struct ConvCache {
  Tensor<T> patches;
  ConvGeom geom{};
};

struct Conv2d {
  int in_c = 0, out_c = 0, kernel = 4, stride = 1;
  size_t w_off = 0, b_off = 0;

  void describe(ParamLayout& layout, const std::string& name) {
    w_off = layout.add(name + ".w", {kernel, kernel, in_c, out_c}, InitKind::conv_weight);
    b_off = layout.add(name + ".b", {out_c}, InitKind::zero);
  }

  template <typename T>
  void forward(const T* params, const Tensor<T>& x, Tensor<T>& y, ConvCache<T>& cache) const {
    require(x.channels() == in_c, "conv: expected ", in_c, " channels, got ", x.channels());
    cache.geom = same_conv_geom(x.height(), x.width(), kernel, stride);
    im2col(cache.geom, x, cache.patches);
    const int m = cache.geom.oh * cache.geom.ow;
    const int k = kernel * kernel * in_c;
    ensure_shape(y, cache.geom.oh, cache.geom.ow, out_c);
    matmul(y.data(), cache.patches.data(), params + w_off, m, k, out_c);
    const T* bias = params + b_off;
    T* out = y.data();
    for (int r = 0; r < m; ++r, out += out_c)
      for (int o = 0; o < out_c; ++o) out[o] += bias[o];
  }

  // Writes dx (when non-null) and accumulates parameter gradients into
  // `grads` (when non-null).
  template <typename T>
  void backward(const T* params, T* grads, const ConvCache<T>& cache, const Tensor<T>& dy,
                Tensor<T>* dx, Tensor<T>& scratch) const {
    const ConvGeom& g = cache.geom;
    const int m = g.oh * g.ow;
    const int k = kernel * kernel * in_c;
    if (grads != nullptr) {
      matmul_at(grads + w_off, cache.patches.data(), dy.data(), k, m, out_c, true);
      T* db = grads + b_off;
      const T* d = dy.data();
      for (int r = 0; r < m; ++r, d += out_c)
        for (int o = 0; o < out_c; ++o) db[o] += d[o];
    }
    if (dx != nullptr) {
      ensure_shape2(scratch, m, k);
      matmul_bt(scratch.data(), dy.data(), params + w_off, m, out_c, k);
      ensure_shape(*dx, g.ih, g.iw, in_c);
      dx->set_zero();
      col2im_add(g, scratch, *dx);
    }
  }
};

// ---------------------------------------------------------------------------
// ConvTranspose2d, the exact adjoint of a stride-s "same" convolution mapping
// the (larger) output plane back to the input plane. Weights follow that
// adjoint convolution: [kernel*kernel*out_c, in_c], bias [out_c].
// ---------------------------------------------------------------------------

template <typename T>
struct ConvTCache {
  Tensor<T> x;  // kept for the weight gradient
  ConvGeom geom{};
};

struct ConvTranspose2d {
  int in_c = 0, out_c = 0, kernel = 4, stride = 2;
  size_t w_off = 0, b_off = 0;

  void describe(ParamLayout& layout, const std::string& name) {
    w_off = layout.add(name + ".w", {kernel, kernel, out_c, in_c}, InitKind::conv_weight);
    b_off = layout.add(name + ".b", {out_c}, InitKind::zero);
  }

  template <typename T>
  void forward(const T* params, const Tensor<T>& x, Tensor<T>& y, ConvTCache<T>& cache,
               Tensor<T>& scratch) const {
    require(x.channels() == in_c, "conv_t: expected ", in_c, " channels, got ", x.channels());
    const int oh = x.height() * stride;
    const int ow = x.width() * stride;
    cache.geom = same_conv_geom(oh, ow, kernel, stride);
    cache.x = x;
    const int m = x.height() * x.width();
    const int k_cols = kernel * kernel * out_c;
    ensure_shape2(scratch, m, k_cols);
    matmul_bt(scratch.data(), x.data(), params + w_off, m, in_c, k_cols);
    ensure_shape(y, oh, ow, out_c);
    y.set_zero();
    col2im_add(cache.geom, scratch, y);
    const T* bias = params + b_off;
    T* out = y.data();
    for (int r = 0; r < oh * ow; ++r, out += out_c)
      for (int o = 0; o < out_c; ++o) out[o] += bias[o];
  }

  template <typename T>
  void backward(const T* params, T* grads, const ConvTCache<T>& cache, const Tensor<T>& dy,
                Tensor<T>* dx, Tensor<T>& scratch) const {
    const ConvGeom& g = cache.geom;
    const int m = cache.x.height() * cache.x.width();
    const int k_cols = kernel * kernel * out_c;
    im2col(g, dy, scratch);  // [m, k_cols]
    if (grads != nullptr) {
      matmul_at(grads + w_off, scratch.data(), cache.x.data(), k_cols, m, in_c, true);
      T* db = grads + b_off;
      const T* d = dy.data();
      for (int r = 0; r < g.oh * g.ow; ++r, d += out_c)
        for (int o = 0; o < out_c; ++o) db[o] += d[o];
    }
    if (dx != nullptr) {
      ensure_shape(*dx, cache.x.height(), cache.x.width(), in_c);
      matmul(dx->data(), scratch.data(), params + w_off, m, k_cols, in_c);
    }
  }
};

// ---------------------------------------------------------------------------
// Instance normalization over the spatial plane, per channel, with affine
// scale/shift. gamma starts at 1, beta at 0.
// ---------------------------------------------------------------------------

template <typename T>
struct InstanceNormCache {
  Tensor<T> xhat;
  std::vector<T> inv_std;
};

struct InstanceNorm {
  int channels = 0;
  double eps = 1e-5;
  size_t gamma_off = 0, beta_off = 0;

  void describe(ParamLayout& layout, const std::string& name) {
    gamma_off = layout.add(name + ".gamma", {channels}, InitKind::one);
    beta_off = layout.add(name + ".beta", {channels}, InitKind::zero);
  }

  template <typename T>
  void forward(const T* params, const Tensor<T>& x, Tensor<T>& y,
               InstanceNormCache<T>& cache) const {
    require(x.channels() == channels, "instance_norm: channel mismatch");
    const int n = x.height() * x.width();
    const T* gamma = params + gamma_off;
    const T* beta = params + beta_off;
    ensure_shape(y, x.height(), x.width(), channels);
    ensure_shape(cache.xhat, x.height(), x.width(), channels);
    cache.inv_std.assign(static_cast<size_t>(channels), T(0));
    for (int c = 0; c < channels; ++c) {
      double sum = 0.0, sum_sq = 0.0;
      const T* px = x.data() + c;
      for (int i = 0; i < n; ++i) {
        double v = static_cast<double>(px[static_cast<size_t>(i) * channels]);
        sum += v;
        sum_sq += v * v;
      }
      double mean = sum / n;
      double var = std::max(sum_sq / n - mean * mean, 0.0);
      T inv = static_cast<T>(1.0 / std::sqrt(var + eps));
      cache.inv_std[static_cast<size_t>(c)] = inv;
      T* pxh = cache.xhat.data() + c;
      T* py = y.data() + c;
      T mu = static_cast<T>(mean);
      for (int i = 0; i < n; ++i) {
        size_t idx = static_cast<size_t>(i) * channels;
        T xh = (px[idx] - mu) * inv;
        pxh[idx] = xh;
        py[idx] = gamma[c] * xh + beta[c];
      }
    }
  }

  template <typename T>
  void backward(const T* params, T* grads, const InstanceNormCache<T>& cache,
                const Tensor<T>& dy, Tensor<T>* dx) const {
    const int n = cache.xhat.height() * cache.xhat.width();
    const T* gamma = params + gamma_off;
    if (dx != nullptr)
      ensure_shape(*dx, cache.xhat.height(), cache.xhat.width(), channels);
    for (int c = 0; c < channels; ++c) {
      const T* pdy = dy.data() + c;
      const T* pxh = cache.xhat.data() + c;
      double sum_dy = 0.0, sum_dy_xh = 0.0;
      for (int i = 0; i < n; ++i) {
        size_t idx = static_cast<size_t>(i) * channels;
        sum_dy += static_cast<double>(pdy[idx]);
        sum_dy_xh += static_cast<double>(pdy[idx]) * pxh[idx];
      }
      if (grads != nullptr) {
        grads[beta_off + static_cast<size_t>(c)] += static_cast<T>(sum_dy);
        grads[gamma_off + static_cast<size_t>(c)] += static_cast<T>(sum_dy_xh);
      }
      if (dx != nullptr) {
        T* pdx = dx->data() + c;
        T scale = gamma[c] * cache.inv_std[static_cast<size_t>(c)];
        T mean_dy = static_cast<T>(sum_dy / n);
        T mean_dy_xh = static_cast<T>(sum_dy_xh / n);
        for (int i = 0; i < n; ++i) {
          size_t idx = static_cast<size_t>(i) * channels;
          pdx[idx] = scale * (pdy[idx] - mean_dy - pxh[idx] * mean_dy_xh);
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Activations. Caches hold the activation output; both leaky-rectifier and
// tanh derivatives are recoverable from it.
// ---------------------------------------------------------------------------

template <typename T>
void leaky_relu_forward(const Tensor<T>& x, T slope, Tensor<T>& y) {
  ensure_shape(y, x.height(), x.width(), x.channels());
  const T* px = x.data();
  T* py = y.data();
  for (size_t i = 0; i < x.size(); ++i) py[i] = px[i] > T(0) ? px[i] : slope * px[i];
}

template <typename T>
void leaky_relu_backward(const Tensor<T>& y, T slope, const Tensor<T>& dy, Tensor<T>& dx) {
  ensure_shape(dx, y.height(), y.width(), y.channels());
  const T* py = y.data();
  const T* pdy = dy.data();
  T* pdx = dx.data();
  for (size_t i = 0; i < y.size(); ++i) pdx[i] = py[i] > T(0) ? pdy[i] : slope * pdy[i];
}

template <typename T>
void tanh_forward(const Tensor<T>& x, Tensor<T>& y) {
  ensure_shape(y, x.height(), x.width(), x.channels());
  const T* px = x.data();
  T* py = y.data();
  for (size_t i = 0; i < x.size(); ++i) py[i] = std::tanh(px[i]);
}

template <typename T>
void tanh_backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) {
  ensure_shape(dx, y.height(), y.width(), y.channels());
  const T* py = y.data();
  const T* pdy = dy.data();
  T* pdx = dx.data();
  for (size_t i = 0; i < y.size(); ++i) pdx[i] = pdy[i] * (T(1) - py[i] * py[i]);
}

// ---------------------------------------------------------------------------
// Inverted dropout; active only when an rng is supplied (training mode).
// ---------------------------------------------------------------------------

template <typename T>
struct DropoutCache {
  std::vector<uint8_t> keep;
  bool active = false;
};

template <typename T>
void dropout_forward(const Tensor<T>& x, double rate, Rng* rng, Tensor<T>& y,
                     DropoutCache<T>& cache) {
  ensure_shape(y, x.height(), x.width(), x.channels());
  cache.active = rng != nullptr && rate > 0.0;
  if (!cache.active) {
    std::copy(x.data(), x.data() + x.size(), y.data());
    return;
  }
  cache.keep.assign(x.size(), 0);
  T scale = static_cast<T>(1.0 / (1.0 - rate));
  const T* px = x.data();
  T* py = y.data();
  for (size_t i = 0; i < x.size(); ++i) {
    bool keep = rng->uniform() >= rate;
    cache.keep[i] = keep ? 1 : 0;
    py[i] = keep ? px[i] * scale : T(0);
  }
}

template <typename T>
void dropout_backward(const DropoutCache<T>& cache, double rate, const Tensor<T>& dy,
                      Tensor<T>& dx) {
  ensure_shape(dx, dy.height(), dy.width(), dy.channels());
  if (!cache.active) {
    std::copy(dy.data(), dy.data() + dy.size(), dx.data());
    return;
  }
  T scale = static_cast<T>(1.0 / (1.0 - rate));
  const T* pdy = dy.data();
  T* pdx = dx.data();
  for (size_t i = 0; i < dy.size(); ++i) pdx[i] = cache.keep[i] ? pdy[i] * scale : T(0);
}

// ---------------------------------------------------------------------------
// Softmax over a small vector (the domain head).
// ---------------------------------------------------------------------------

template <typename T>
void softmax(const T* logits, T* probs, int n) {
  T hi = logits[0];
  for (int i = 1; i < n; ++i) hi = std::max(hi, logits[i]);
  T sum = T(0);
  for (int i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - hi);
    sum += probs[i];
  }
  for (int i = 0; i < n; ++i) probs[i] /= sum;
}

template <typename T>
void softmax_backward(const T* probs, const T* dprobs, T* dlogits, int n) {
  T dot = T(0);
  for (int i = 0; i < n; ++i) dot += dprobs[i] * probs[i];
  for (int i = 0; i < n; ++i) dlogits[i] = probs[i] * (dprobs[i] - dot);
}

}  // namespace collasprite::nn
