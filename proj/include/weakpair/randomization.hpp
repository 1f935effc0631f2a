#pragma once

#include <cstdint>
#include <numbers>

#include "weakpair/geometry.hpp"
#include "weakpair/image.hpp"

namespace weakpair {

/// Sampling bounds for an injected pose. Defaults: translation within
/// [-50, 50] px per axis, rotation in [0, pi), scale in [0.8, 1.2].
struct PoseRange {
  double scale_min = 0.8;
  double scale_max = 1.2;
  double theta_min = 0.0;
  double theta_max = std::numbers::pi;
  double t_max = 50.0;
  bool log_uniform_scale = false;

  static PoseRange identity() { return {1.0, 1.0, 0.0, 0.0, 0.0, false}; }
  void validate() const;
};

/// Each component uniform over its interval (scale optionally log-uniform).
/// Deterministic per seed.
Sim2Pose sample_pose(const PoseRange& range, std::uint64_t seed);

struct RandomizedPair {
  Image original;
  Image randomized;  // warp(original, xi_r)
  Sim2Pose xi_r;
  std::uint64_t seed = 0;
};

/// Pose injected into the original image only.
RandomizedPair inject_original_only(const Image& original, const PoseRange& range, std::uint64_t seed);

struct InjectedBoth {
  Image original;
  Image target;
  Sim2Pose xi_r;
};

/// The same sampled pose applied to both images.
InjectedBoth inject_both(const Image& original, const Image& target, const PoseRange& range,
                         std::uint64_t seed);

/// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace weakpair
