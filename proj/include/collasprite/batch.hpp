#pragma once

#include <array>
#include <set>
#include <vector>

#include "collasprite/domain.hpp"
#include "collasprite/rng.hpp"
#include "collasprite/sprite.hpp"
#include "collasprite/tensor.hpp"

namespace collasprite {

// Target-domain indicator replicated over every pixel position: channel t is
// all ones, the rest all zeros. Concatenated with a sprite it forms the
// 64x64x8 encoder-branch input.
struct TargetLabel {
  DomainId domain = DomainId::back;
};

template <typename T = float>
Tensor<T> label_map(DomainId t, int h = kSpriteSize, int w = kSpriteSize) {
  Tensor<T> map(h, w, kNumDomains);
  int c = index_of(t);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) map(y, x, c) = T(1);
  return map;
}

inline TargetLabel spatial_one_hot(DomainId t) { return TargetLabel{t}; }

// ---------------------------------------------------------------------------
// Input dropout schedules: how many source slots to blank per training step.
// ---------------------------------------------------------------------------

enum class DropoutKind { none, original, curriculum, conservative };

struct DropoutStrategy {
  DropoutKind kind = DropoutKind::conservative;
  // P(drop 0), P(drop 1), P(drop 2); used by the stochastic kinds.
  std::array<double, 3> probs = {0.6, 0.3, 0.1};
  // Curriculum phase ends as fractions of total steps: k=0 until frac[0],
  // k=1 until frac[1], k=2 until frac[2], then random.
  std::array<double, 3> phase_fractions = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 2.0};

  static DropoutStrategy make(DropoutKind kind) {
    DropoutStrategy s;
    s.kind = kind;
    switch (kind) {
      case DropoutKind::none: s.probs = {1.0, 0.0, 0.0}; break;
      case DropoutKind::original: s.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; break;
      case DropoutKind::curriculum: s.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; break;
      case DropoutKind::conservative: s.probs = {0.6, 0.3, 0.1}; break;
    }
    return s;
  }

  void validate() const {
    double sum = probs[0] + probs[1] + probs[2];
    require(std::abs(sum - 1.0) < 1e-9, "dropout probabilities must sum to 1, got ", sum);
    for (double p : probs) require(p >= 0.0, "dropout probabilities must be non-negative");
  }
};

inline const char* dropout_kind_name(DropoutKind k) {
  switch (k) {
    case DropoutKind::none: return "none";
    case DropoutKind::original: return "original";
    case DropoutKind::curriculum: return "curriculum";
    case DropoutKind::conservative: return "conservative";
  }
  return "?";
}

inline DropoutKind parse_dropout_kind(std::string_view name) {
  for (DropoutKind k : {DropoutKind::none, DropoutKind::original, DropoutKind::curriculum,
                        DropoutKind::conservative})
    if (dropout_kind_name(k) == name) return k;
  fail("unknown dropout strategy '", std::string(name),
       "' (expected none|original|curriculum|conservative)");
}

inline int sample_from_probs(const std::array<double, 3>& probs, Rng& rng) {
  double u = rng.uniform();
  if (u < probs[0]) return 0;
  if (u < probs[0] + probs[1]) return 1;
  return 2;
}

// Number of source images to drop for this step, in {0, 1, 2}.
inline int sample_drop_count(const DropoutStrategy& strategy, int64_t step,
                             int64_t total_steps, Rng& rng) {
  require(step >= 0 && step < total_steps, "sample_drop_count: step ", step,
          " outside [0, ", total_steps, ")");
  switch (strategy.kind) {
    case DropoutKind::none:
      return 0;
    case DropoutKind::original:
    case DropoutKind::conservative:
      return sample_from_probs(strategy.probs, rng);
    case DropoutKind::curriculum: {
      // Easy-to-hard phases over the first half, then random.
      auto bound = [&](double frac) {
        return static_cast<int64_t>(static_cast<double>(total_steps) * frac);
      };
      if (step < bound(strategy.phase_fractions[0])) return 0;
      if (step < bound(strategy.phase_fractions[1])) return 1;
      if (step < bound(strategy.phase_fractions[2])) return 2;
      return sample_from_probs(strategy.probs, rng);
    }
  }
  fail("unreachable dropout kind");
}

// Uniform choice among the C(3, k) subsets of the non-target domains.
inline std::vector<DomainId> pick_dropped_domains(DomainId target, int count, Rng& rng) {
  require(count >= 0 && count <= 2, "drop count must be in {0,1,2}, got ", count);
  std::vector<DomainId> others;
  for (DomainId d : all_domains())
    if (d != target) others.push_back(d);

  std::vector<std::vector<DomainId>> subsets;
  if (count == 0) {
    subsets.push_back({});
  } else if (count == 1) {
    for (DomainId d : others) subsets.push_back({d});
  } else {
    for (size_t i = 0; i < others.size(); ++i)
      for (size_t j = i + 1; j < others.size(); ++j)
        subsets.push_back({others[i], others[j]});
  }
  return subsets[static_cast<size_t>(rng.uniform_int(subsets.size()))];
}

// ---------------------------------------------------------------------------
// Source sets: the generator's four input slots.
// ---------------------------------------------------------------------------

enum class ReplacementStrategy { original, forward_only };

inline const char* replacement_name(ReplacementStrategy r) {
  return r == ReplacementStrategy::original ? "original" : "forward_only";
}

inline ReplacementStrategy parse_replacement(std::string_view name) {
  if (name == "original") return ReplacementStrategy::original;
  if (name == "forward_only") return ReplacementStrategy::forward_only;
  fail("unknown replacement strategy '", std::string(name),
       "' (expected original|forward_only)");
}

template <typename T = float>
struct SourceSet {
  std::array<Tensor<T>, kNumDomains> slots;
  std::array<bool, kNumDomains> present{};  // false <=> slot holds no real sprite
  DomainId target = DomainId::back;
};

namespace detail {
template <typename T>
Tensor<T> zero_slot() {
  return Tensor<T>(kSpriteSize, kSpriteSize, kSpriteChannels);
}

inline void check_dropped(DomainId target, const std::vector<DomainId>& dropped) {
  require(dropped.size() <= 2, "at most 2 domains may be dropped, got ", dropped.size());
  for (size_t i = 0; i < dropped.size(); ++i) {
    require(dropped[i] != target, "cannot drop the target domain '",
            domain_name(target), "'");
    for (size_t j = i + 1; j < dropped.size(); ++j)
      require(dropped[i] != dropped[j], "duplicate domain in dropped set");
  }
}

inline bool contains(const std::vector<DomainId>& v, DomainId d) {
  for (DomainId x : v)
    if (x == d) return true;
  return false;
}
}  // namespace detail

// Forward-pass input: the target slot and every dropped slot are zero
// tensors, remaining slots carry the sheet's sprites.
template <typename T = float>
std::pair<SourceSet<T>, TargetLabel> build_forward_input(
    const std::array<Tensor<T>, kNumDomains>& sheet, DomainId target,
    const std::vector<DomainId>& dropped) {
  detail::check_dropped(target, dropped);
  SourceSet<T> set;
  set.target = target;
  for (DomainId d : all_domains()) {
    size_t i = static_cast<size_t>(index_of(d));
    if (d == target || detail::contains(dropped, d)) {
      set.slots[i] = detail::zero_slot<T>();
      set.present[i] = false;
    } else {
      set.slots[i] = sheet[i];
      set.present[i] = true;
    }
  }
  return {std::move(set), spatial_one_hot(target)};
}

// Backward (cyclic) inputs: one per source domain s, with s zeroed as the new
// target and the forward output standing in for the original target. Under
// the original replacement rule the forward output also fills the dropped
// slots; under forward_only they stay zero.
template <typename T = float>
std::vector<std::pair<SourceSet<T>, TargetLabel>> build_backward_inputs(
    const std::array<Tensor<T>, kNumDomains>& sheet, DomainId target,
    const Tensor<T>& forward_output, const std::vector<DomainId>& dropped,
    ReplacementStrategy strategy) {
  detail::check_dropped(target, dropped);
  require(forward_output.rank() == 3 && forward_output.height() == kSpriteSize &&
              forward_output.width() == kSpriteSize &&
              forward_output.channels() == kSpriteChannels,
          "forward output must be a sprite tensor");

  std::vector<std::pair<SourceSet<T>, TargetLabel>> inputs;
  for (DomainId s : all_domains()) {
    if (s == target) continue;
    SourceSet<T> set;
    set.target = s;
    for (DomainId d : all_domains()) {
      size_t i = static_cast<size_t>(index_of(d));
      if (d == s) {
        set.slots[i] = detail::zero_slot<T>();
        set.present[i] = false;
      } else if (d == target) {
        set.slots[i] = forward_output;
        set.present[i] = false;  // generated, not a real sprite
      } else if (detail::contains(dropped, d)) {
        set.slots[i] = strategy == ReplacementStrategy::original ? forward_output
                                                                 : detail::zero_slot<T>();
        set.present[i] = false;
      } else {
        set.slots[i] = sheet[i];
        set.present[i] = true;
      }
    }
    inputs.emplace_back(std::move(set), spatial_one_hot(s));
  }
  return inputs;
}

template <typename T = float>
std::array<Tensor<T>, kNumDomains> sheet_to_tensors(const CharacterSheet& sheet) {
  std::array<Tensor<T>, kNumDomains> out;
  for (DomainId d : all_domains())
    out[static_cast<size_t>(index_of(d))] = sheet.pose(d).template to_model<T>();
  return out;
}

}  // namespace collasprite
