#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "collasprite/batch.hpp"
#include "collasprite/nn/layer_ops.hpp"

namespace collasprite::nn {

// Channel plan of the imputation generator. Four encoder branches (one per
// pose) of four downsampling blocks each, a bottleneck that fuses the
// concatenated branch maps, and a single decoder of four upsampling blocks
// with skip connections from the concatenated encoder activations.
// width_multiplier scales every channel count; it exists so tests can train
// quickly while the default reproduces full-scale widths.
struct GeneratorConfig {
  std::vector<int> branch_channels = {64, 128, 256, 512};
  int bottleneck_channels = 1024;
  std::vector<int> decoder_channels = {1024, 512, 256, 128, 64};
  double width_multiplier = 1.0;
  int kernel = 4;

  int scaled(int c) const {
    return std::max(1, static_cast<int>(std::lround(c * width_multiplier)));
  }

  void validate() const {
    require(branch_channels.size() == 4, "generator needs 4 encoder blocks per branch");
    require(decoder_channels.size() == 5, "generator decoder channel list must have 5 entries");
    require(decoder_channels[0] == bottleneck_channels,
            "decoder_channels[0] is the bottleneck output and must match");
    require(width_multiplier > 0.0, "width_multiplier must be positive");
    require(kernel >= 2, "kernel must be at least 2");
  }

  nlohmann::json to_json() const {
    return {{"branch_channels", branch_channels},
            {"bottleneck_channels", bottleneck_channels},
            {"decoder_channels", decoder_channels},
            {"width_multiplier", width_multiplier},
            {"kernel", kernel}};
  }

  static GeneratorConfig from_json(const nlohmann::json& j) {
    GeneratorConfig cfg;
    cfg.branch_channels = j.at("branch_channels").get<std::vector<int>>();
    cfg.bottleneck_channels = j.at("bottleneck_channels").get<int>();
    cfg.decoder_channels = j.at("decoder_channels").get<std::vector<int>>();
    cfg.width_multiplier = j.at("width_multiplier").get<double>();
    cfg.kernel = j.at("kernel").get<int>();
    cfg.validate();
    return cfg;
  }

  bool operator==(const GeneratorConfig&) const = default;
};

namespace detail {

// Downsampling block: strided conv + refinement conv, each followed by
// normalization (absent in the first encoder block) and a leaky rectifier.
struct EncBlock {
  Conv2d conv_a, conv_b;
  InstanceNorm norm_a, norm_b;
  bool has_norm = true;

  void configure(int in_c, int out_c, int kernel, bool norm) {
    conv_a = {in_c, out_c, kernel, 2, 0, 0};
    conv_b = {out_c, out_c, kernel, 1, 0, 0};
    norm_a = {out_c, 1e-5, 0, 0};
    norm_b = {out_c, 1e-5, 0, 0};
    has_norm = norm;
  }

  void describe(ParamLayout& layout, const std::string& name) {
    conv_a.describe(layout, name + ".conv_a");
    if (has_norm) norm_a.describe(layout, name + ".norm_a");
    conv_b.describe(layout, name + ".conv_b");
    if (has_norm) norm_b.describe(layout, name + ".norm_b");
  }
};

struct DecBlock {
  ConvTranspose2d up;
  Conv2d conv_b;
  InstanceNorm norm_a, norm_b;

  void configure(int in_c, int out_c, int kernel) {
    up = {in_c, out_c, kernel, 2, 0, 0};
    conv_b = {out_c, out_c, kernel, 1, 0, 0};
    norm_a = {out_c, 1e-5, 0, 0};
    norm_b = {out_c, 1e-5, 0, 0};
  }

  void describe(ParamLayout& layout, const std::string& name) {
    up.describe(layout, name + ".up");
    norm_a.describe(layout, name + ".norm_a");
    conv_b.describe(layout, name + ".conv_b");
    norm_b.describe(layout, name + ".norm_b");
  }
};

}  // namespace detail

template <typename T>
struct EncBlockCache {
  ConvCache<T> conv_a, conv_b;
  InstanceNormCache<T> norm_a, norm_b;
  Tensor<T> act_a, act_b;  // leaky-relu outputs; act_b is the block output
  Tensor<T> tmp;
};

template <typename T>
struct DecBlockCache {
  ConvTCache<T> up;
  ConvCache<T> conv_b;
  InstanceNormCache<T> norm_a, norm_b;
  Tensor<T> act_a, act_b;
  Tensor<T> input;  // concatenated (previous output, skip)
  Tensor<T> tmp;
};

template <typename T>
struct GeneratorCache {
  std::array<std::array<EncBlockCache<T>, 4>, kNumDomains> enc;
  std::array<Tensor<T>, kNumDomains> branch_input;  // slot + label, 64x64x8
  std::array<Tensor<T>, 4> skip;                    // per level, concat across branches
  ConvCache<T> bneck_conv;
  InstanceNormCache<T> bneck_norm;
  Tensor<T> bneck_act;
  std::array<DecBlockCache<T>, 4> dec;
  ConvCache<T> out_conv;
  Tensor<T> output;  // tanh output
  Tensor<T> label;
  Tensor<T> tmp, scratch;
  // backward workspaces
  std::array<Tensor<T>, 4> d_skip;
  Tensor<T> d_tmp, d_tmp2, d_prev;
};

template <typename T>
class Generator {
 public:
  explicit Generator(GeneratorConfig cfg, bool allocate = true) : cfg_(std::move(cfg)) {
    cfg_.validate();
    build();
    if (allocate) params_.assign(layout_.total(), T(0));
  }

  const GeneratorConfig& config() const { return cfg_; }
  const ParamLayout& layout() const { return layout_; }
  size_t param_count() const { return layout_.total(); }
  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }

  void init(Rng& rng) { init_params(layout_, params_.data(), rng); }

  // Count without allocating the parameter storage (full width is ~100M
  // scalars; the layout alone is enough).
  static size_t param_count_for(const GeneratorConfig& cfg) {
    return Generator(cfg, false).param_count();
  }

  // Imputes the target-domain sprite from the four input slots. Pure in
  // (params, input); the cache carries every intermediate needed by
  // backward() and is reusable across calls to avoid reallocation.
  void forward(const SourceSet<T>& input, const TargetLabel& label, Tensor<T>& y,
               GeneratorCache<T>& cache) const {
    const T* p = params_.data();
    cache.label = label_map<T>(label.domain);

    std::array<std::array<const Tensor<T>*, kNumDomains>, 4> level_outputs{};
    for (int br = 0; br < kNumDomains; ++br) {
      const Tensor<T>& slot = input.slots[static_cast<size_t>(br)];
      require(slot.rank() == 3 && slot.height() == kSpriteSize &&
                  slot.width() == kSpriteSize && slot.channels() == kSpriteChannels,
              "generator: slot ", br, " has wrong shape");
      concat_channels<T>({&slot, &cache.label}, cache.branch_input[static_cast<size_t>(br)]);
      const Tensor<T>* x = &cache.branch_input[static_cast<size_t>(br)];
      for (int l = 0; l < 4; ++l) {
        auto& blk = enc_[static_cast<size_t>(br)][static_cast<size_t>(l)];
        auto& bc = cache.enc[static_cast<size_t>(br)][static_cast<size_t>(l)];
        blk.conv_a.forward(p, *x, bc.tmp, bc.conv_a);
        if (blk.has_norm) {
          blk.norm_a.forward(p, bc.tmp, bc.act_a, bc.norm_a);
          leaky_relu_forward(bc.act_a, kSlope, bc.act_a);
        } else {
          leaky_relu_forward(bc.tmp, kSlope, bc.act_a);
        }
        blk.conv_b.forward(p, bc.act_a, bc.tmp, bc.conv_b);
        if (blk.has_norm) {
          blk.norm_b.forward(p, bc.tmp, bc.act_b, bc.norm_b);
          leaky_relu_forward(bc.act_b, kSlope, bc.act_b);
        } else {
          leaky_relu_forward(bc.tmp, kSlope, bc.act_b);
        }
        level_outputs[static_cast<size_t>(l)][static_cast<size_t>(br)] = &bc.act_b;
        x = &bc.act_b;
      }
    }

    for (int l = 0; l < 4; ++l)
      concat_channels<T>({level_outputs[static_cast<size_t>(l)][0],
                          level_outputs[static_cast<size_t>(l)][1],
                          level_outputs[static_cast<size_t>(l)][2],
                          level_outputs[static_cast<size_t>(l)][3]},
                         cache.skip[static_cast<size_t>(l)]);

    bneck_conv_.forward(p, cache.skip[3], cache.tmp, cache.bneck_conv);
    bneck_norm_.forward(p, cache.tmp, cache.bneck_act, cache.bneck_norm);
    leaky_relu_forward(cache.bneck_act, kSlope, cache.bneck_act);

    const Tensor<T>* prev = &cache.bneck_act;
    for (int l = 0; l < 4; ++l) {
      auto& blk = dec_[static_cast<size_t>(l)];
      auto& dc = cache.dec[static_cast<size_t>(l)];
      concat_channels<T>({prev, &cache.skip[static_cast<size_t>(3 - l)]}, dc.input);
      blk.up.forward(p, dc.input, dc.tmp, dc.up, cache.scratch);
      blk.norm_a.forward(p, dc.tmp, dc.act_a, dc.norm_a);
      leaky_relu_forward(dc.act_a, T(0), dc.act_a);
      blk.conv_b.forward(p, dc.act_a, dc.tmp, dc.conv_b);
      blk.norm_b.forward(p, dc.tmp, dc.act_b, dc.norm_b);
      leaky_relu_forward(dc.act_b, T(0), dc.act_b);
      prev = &dc.act_b;
    }

    out_conv_.forward(p, *prev, cache.tmp, cache.out_conv);
    tanh_forward(cache.tmp, cache.output);
    y = cache.output;
  }

  // Backpropagates dy through the cached application. Parameter gradients
  // accumulate into `grads` (layout offsets); slot gradients, when requested,
  // are written per domain.
  void backward(const Tensor<T>& dy, GeneratorCache<T>& cache, T* grads,
                std::array<Tensor<T>, kNumDomains>* d_slots) const {
    const T* p = params_.data();
    Tensor<T>& d = cache.d_tmp;
    Tensor<T>& d2 = cache.d_tmp2;

    tanh_backward(cache.output, dy, d);
    out_conv_.backward(p, grads, cache.out_conv, d, &cache.d_prev, cache.scratch);

    for (size_t l = 0; l < 4; ++l) {
      ensure_shape(cache.d_skip[l], cache.skip[l].height(), cache.skip[l].width(),
                   cache.skip[l].channels());
      cache.d_skip[l].set_zero();
    }

    // decoder, deepest-last
    for (int l = 3; l >= 0; --l) {
      auto& blk = dec_[static_cast<size_t>(l)];
      auto& dc = cache.dec[static_cast<size_t>(l)];
      leaky_relu_backward(dc.act_b, T(0), cache.d_prev, d);
      blk.norm_b.backward(p, grads, dc.norm_b, d, &d2);
      blk.conv_b.backward(p, grads, dc.conv_b, d2, &d, cache.scratch);
      leaky_relu_backward(dc.act_a, T(0), d, d);
      blk.norm_a.backward(p, grads, dc.norm_a, d, &d2);
      blk.up.backward(p, grads, dc.up, d2, &d, cache.scratch);
      // split concatenated input gradient into previous-output and skip parts
      int prev_c = d.channels() - cache.skip[static_cast<size_t>(3 - l)].channels();
      ensure_shape(cache.d_prev, d.height(), d.width(), prev_c);
      cache.d_prev.set_zero();
      split_channels_add<T>(d, {&cache.d_prev, &cache.d_skip[static_cast<size_t>(3 - l)]},
                            {prev_c, cache.skip[static_cast<size_t>(3 - l)].channels()});
    }

    // bottleneck; its input is the level-3 concat, same tensor the decoder
    // skips into, so the gradient adds on top.
    leaky_relu_backward(cache.bneck_act, kSlope, cache.d_prev, d);
    bneck_norm_.backward(p, grads, cache.bneck_norm, d, &d2);
    bneck_conv_.backward(p, grads, cache.bneck_conv, d2, &d, cache.scratch);
    {
      const T* src = d.data();
      T* dst = cache.d_skip[3].data();
      for (size_t i = 0; i < d.size(); ++i) dst[i] += src[i];
    }

    // encoder branches
    for (int br = 0; br < kNumDomains; ++br) {
      Tensor<T>& d_above = cache.d_prev;  // gradient arriving from block l+1
      for (int l = 3; l >= 0; --l) {
        auto& blk = enc_[static_cast<size_t>(br)][static_cast<size_t>(l)];
        auto& bc = cache.enc[static_cast<size_t>(br)][static_cast<size_t>(l)];
        // this block's output gradient: its slice of the level concat plus,
        // for l < 3, whatever block l+1 sent down
        const Tensor<T>& skip_grad = cache.d_skip[static_cast<size_t>(l)];
        int c = bc.act_b.channels();
        ensure_shape(d, bc.act_b.height(), bc.act_b.width(), c);
        for (int y = 0; y < d.height(); ++y)
          for (int x = 0; x < d.width(); ++x) {
            const T* src = &skip_grad(y, x, br * c);
            T* dst = &d(y, x, 0);
            std::copy(src, src + c, dst);
          }
        if (l < 3) {
          const T* src = d_above.data();
          T* dst = d.data();
          for (size_t i = 0; i < d.size(); ++i) dst[i] += src[i];
        }

        Tensor<T>* cur = &d;
        Tensor<T>* oth = &d2;
        leaky_relu_backward(bc.act_b, kSlope, *cur, *cur);
        if (blk.has_norm) {
          blk.norm_b.backward(p, grads, bc.norm_b, *cur, oth);
          std::swap(cur, oth);
        }
        blk.conv_b.backward(p, grads, bc.conv_b, *cur, oth, cache.scratch);
        std::swap(cur, oth);
        leaky_relu_backward(bc.act_a, kSlope, *cur, *cur);
        if (blk.has_norm) {
          blk.norm_a.backward(p, grads, bc.norm_a, *cur, oth);
          std::swap(cur, oth);
        }
        blk.conv_a.backward(p, grads, bc.conv_a, *cur, &d_above, cache.scratch);
      }
      if (d_slots != nullptr) {
        Tensor<T>& out = (*d_slots)[static_cast<size_t>(br)];
        ensure_shape(out, kSpriteSize, kSpriteSize, kSpriteChannels);
        out.set_zero();
        split_channels_add<T>(d_above, {&out, nullptr}, {kSpriteChannels, kNumDomains});
      }
    }
  }

 private:
  static constexpr T kSlope = static_cast<T>(0.2);

  void build() {
    auto sc = [this](int c) { return cfg_.scaled(c); };
    std::array<int, 4> e{};
    for (int l = 0; l < 4; ++l) e[static_cast<size_t>(l)] = sc(cfg_.branch_channels[static_cast<size_t>(l)]);
    int bneck = sc(cfg_.bottleneck_channels);
    std::array<int, 4> dch{};
    for (int l = 0; l < 4; ++l)
      dch[static_cast<size_t>(l)] = sc(cfg_.decoder_channels[static_cast<size_t>(l + 1)]);

    for (int br = 0; br < kNumDomains; ++br) {
      for (int l = 0; l < 4; ++l) {
        int in_c = l == 0 ? kSpriteChannels + kNumDomains : e[static_cast<size_t>(l - 1)];
        enc_[static_cast<size_t>(br)][static_cast<size_t>(l)].configure(
            in_c, e[static_cast<size_t>(l)], cfg_.kernel, l != 0);
      }
    }
    bneck_conv_ = {4 * e[3], bneck, cfg_.kernel, 1, 0, 0};
    bneck_norm_ = {bneck, 1e-5, 0, 0};
    for (int l = 0; l < 4; ++l) {
      int prev_c = l == 0 ? bneck : dch[static_cast<size_t>(l - 1)];
      int in_c = prev_c + 4 * e[static_cast<size_t>(3 - l)];
      dec_[static_cast<size_t>(l)].configure(in_c, dch[static_cast<size_t>(l)], cfg_.kernel);
    }
    out_conv_ = {dch[3], kSpriteChannels, cfg_.kernel, 1, 0, 0};

    for (int br = 0; br < kNumDomains; ++br)
      for (int l = 0; l < 4; ++l)
        enc_[static_cast<size_t>(br)][static_cast<size_t>(l)].describe(
            layout_, concat("enc.", domain_name(domain_from_index(br)), ".b", l));
    bneck_conv_.describe(layout_, "bottleneck.conv");
    bneck_norm_.describe(layout_, "bottleneck.norm");
    for (int l = 0; l < 4; ++l)
      dec_[static_cast<size_t>(l)].describe(layout_, concat("dec.b", l));
    out_conv_.describe(layout_, "out.conv");
  }

  GeneratorConfig cfg_;
  ParamLayout layout_;
  std::array<std::array<detail::EncBlock, 4>, kNumDomains> enc_{};
  Conv2d bneck_conv_{};
  InstanceNorm bneck_norm_{};
  std::array<detail::DecBlock, 4> dec_{};
  Conv2d out_conv_{};
  std::vector<T> params_;
};

}  // namespace collasprite::nn
