#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "collasprite/common.hpp"

namespace collasprite::nn {

struct AdamConfig {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam over a flat parameter array. Moment buffers share the parameter
// layout, so checkpointing them is a plain tensor dump.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(size_t param_count, AdamConfig cfg)
      : cfg_(cfg), m_(param_count, T(0)), v_(param_count, T(0)) {}

  void step(T* params, const T* grads, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T one_m_b1 = static_cast<T>(1.0 - cfg_.beta1);
    const T one_m_b2 = static_cast<T>(1.0 - cfg_.beta2);
    const T alpha = static_cast<T>(lr * std::sqrt(bc2) / bc1);
    const T eps_hat = static_cast<T>(cfg_.eps * std::sqrt(bc2));
    // theta -= lr * (m/bc1) / (sqrt(v/bc2) + eps) rewritten with a single
    // scaling so the loop stays one fma-friendly pass.
    for (size_t i = 0; i < m_.size(); ++i) {
      T g = grads[i];
      m_[i] = b1 * m_[i] + one_m_b1 * g;
      v_[i] = b2 * v_[i] + one_m_b2 * g * g;
      params[i] -= alpha * m_[i] / (std::sqrt(v_[i]) + eps_hat);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  int64_t steps_taken() const { return t_; }
  void set_steps_taken(int64_t t) { t_ = t; }
  std::vector<T>& m() { return m_; }
  std::vector<T>& v() { return v_; }
  const std::vector<T>& m() const { return m_; }
  const std::vector<T>& v() const { return v_; }

 private:
  AdamConfig cfg_{};
  int64_t t_ = 0;
  std::vector<T> m_, v_;
};

}  // namespace collasprite::nn
