#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "collasprite/domain.hpp"
#include "collasprite/nn/layer_ops.hpp"

namespace collasprite::nn {

// Six strided convolutions halve 64x64 down to a 1x1 feature map; two
// parallel 1x1 heads read it: a linear real/fake score and a 4-way softmax
// domain classifier. No normalization; dropout regularizes the last block
// during training.
struct DiscriminatorConfig {
  std::vector<int> block_channels = {64, 128, 256, 512, 1024, 2048};
  double dropout_rate = 0.5;
  double width_multiplier = 1.0;
  int kernel = 4;

  int scaled(int c) const {
    return std::max(1, static_cast<int>(std::lround(c * width_multiplier)));
  }

  void validate() const {
    require(block_channels.size() == 6, "discriminator needs 6 downsampling blocks");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must be in [0,1)");
    require(width_multiplier > 0.0, "width_multiplier must be positive");
  }

  nlohmann::json to_json() const {
    return {{"block_channels", block_channels},
            {"dropout_rate", dropout_rate},
            {"width_multiplier", width_multiplier},
            {"kernel", kernel}};
  }

  static DiscriminatorConfig from_json(const nlohmann::json& j) {
    DiscriminatorConfig cfg;
    cfg.block_channels = j.at("block_channels").get<std::vector<int>>();
    cfg.dropout_rate = j.at("dropout_rate").get<double>();
    cfg.width_multiplier = j.at("width_multiplier").get<double>();
    cfg.kernel = j.at("kernel").get<int>();
    cfg.validate();
    return cfg;
  }

  bool operator==(const DiscriminatorConfig&) const = default;
};

template <typename T>
struct DiscriminatorCache {
  std::array<ConvCache<T>, 6> conv;
  std::array<Tensor<T>, 6> act;
  DropoutCache<T> dropout;
  Tensor<T> dropped;
  ConvCache<T> adv_head, dmn_head;
  std::array<T, kNumDomains> probs{};
  Tensor<T> tmp, scratch;
  Tensor<T> d_tmp, d_tmp2;
};

template <typename T>
struct DiscriminatorOutput {
  T adv = T(0);
  std::array<T, kNumDomains> domain_probs{};
};

template <typename T>
class Discriminator {
 public:
  explicit Discriminator(DiscriminatorConfig cfg, bool allocate = true)
      : cfg_(std::move(cfg)) {
    cfg_.validate();
    build();
    if (allocate) params_.assign(layout_.total(), T(0));
  }

  const DiscriminatorConfig& config() const { return cfg_; }
  const ParamLayout& layout() const { return layout_; }
  size_t param_count() const { return layout_.total(); }
  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }

  void init(Rng& rng) { init_params(layout_, params_.data(), rng); }

  static size_t param_count_for(const DiscriminatorConfig& cfg) {
    return Discriminator(cfg, false).param_count();
  }

  // rng non-null => training mode (dropout active). Inference is
  // deterministic: two calls on the same input agree bit-exactly.
  DiscriminatorOutput<T> forward(const Tensor<T>& x, DiscriminatorCache<T>& cache,
                                 Rng* rng) const {
    require(x.rank() == 3 && x.height() == kSpriteSize && x.width() == kSpriteSize &&
                x.channels() == kSpriteChannels,
            "discriminator: expected ", kSpriteSize, "x", kSpriteSize, "x",
            kSpriteChannels, " input");
    const T* p = params_.data();
    const Tensor<T>* cur = &x;
    for (int l = 0; l < 6; ++l) {
      conv_[static_cast<size_t>(l)].forward(p, *cur, cache.tmp, cache.conv[static_cast<size_t>(l)]);
      leaky_relu_forward(cache.tmp, kSlope, cache.act[static_cast<size_t>(l)]);
      cur = &cache.act[static_cast<size_t>(l)];
    }
    dropout_forward(*cur, cfg_.dropout_rate, rng, cache.dropped, cache.dropout);

    DiscriminatorOutput<T> out;
    adv_head_.forward(p, cache.dropped, cache.tmp, cache.adv_head);
    out.adv = cache.tmp[0];
    dmn_head_.forward(p, cache.dropped, cache.tmp, cache.dmn_head);
    softmax(cache.tmp.data(), cache.probs.data(), kNumDomains);
    out.domain_probs = cache.probs;
    return out;
  }

  // d_adv / d_probs: upstream gradients for the two heads. dx optional.
  void backward(T d_adv, const std::array<T, kNumDomains>& d_probs,
                DiscriminatorCache<T>& cache, T* grads, Tensor<T>* dx) const {
    const T* p = params_.data();
    Tensor<T>& d = cache.d_tmp;
    Tensor<T>& d2 = cache.d_tmp2;

    // heads share the dropped feature map; gradients add
    std::array<T, kNumDomains> d_logits{};
    softmax_backward(cache.probs.data(), d_probs.data(), d_logits.data(), kNumDomains);
    Tensor<T> d_head(1, 1, kNumDomains);
    for (int i = 0; i < kNumDomains; ++i) d_head(0, 0, i) = d_logits[static_cast<size_t>(i)];
    dmn_head_.backward(p, grads, cache.dmn_head, d_head, &d, cache.scratch);

    Tensor<T> d_adv_t(1, 1, 1);
    d_adv_t(0, 0, 0) = d_adv;
    adv_head_.backward(p, grads, cache.adv_head, d_adv_t, &d2, cache.scratch);
    {
      T* dst = d.data();
      const T* src = d2.data();
      for (size_t i = 0; i < d.size(); ++i) dst[i] += src[i];
    }

    dropout_backward(cache.dropout, cfg_.dropout_rate, d, d2);
    Tensor<T>* cur = &d2;
    Tensor<T>* nxt = &d;
    for (int l = 5; l >= 0; --l) {
      leaky_relu_backward(cache.act[static_cast<size_t>(l)], kSlope, *cur, *cur);
      bool need_dx = l > 0 || dx != nullptr;
      conv_[static_cast<size_t>(l)].backward(p, grads, cache.conv[static_cast<size_t>(l)], *cur,
                                             need_dx ? nxt : nullptr, cache.scratch);
      std::swap(cur, nxt);
    }
    if (dx != nullptr) *dx = *cur;  // the final swap left the last dx in cur
  }

 private:
  static constexpr T kSlope = static_cast<T>(0.2);

  void build() {
    int in_c = kSpriteChannels;
    for (int l = 0; l < 6; ++l) {
      int out_c = cfg_.scaled(cfg_.block_channels[static_cast<size_t>(l)]);
      conv_[static_cast<size_t>(l)] = {in_c, out_c, cfg_.kernel, 2, 0, 0};
      in_c = out_c;
    }
    adv_head_ = {in_c, 1, 1, 1, 0, 0};
    dmn_head_ = {in_c, kNumDomains, 1, 1, 0, 0};

    for (int l = 0; l < 6; ++l)
      conv_[static_cast<size_t>(l)].describe(layout_, concat("disc.b", l, ".conv"));
    adv_head_.describe(layout_, "disc.adv_head");
    dmn_head_.describe(layout_, "disc.dmn_head");
  }

  DiscriminatorConfig cfg_;
  ParamLayout layout_;
  std::array<Conv2d, 6> conv_{};
  Conv2d adv_head_{};
  Conv2d dmn_head_{};
  std::vector<T> params_;
};

}  // namespace collasprite::nn
