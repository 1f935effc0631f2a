#include "weakpair/randomization.hpp"

#include <cmath>
#include <random>

#include "weakpair/error.hpp"

namespace weakpair {

void PoseRange::validate() const {
  if (!(scale_min > 0.0) || !(scale_min <= scale_max))
    throw ValidationError("pose range: need 0 < scale_min <= scale_max");
  if (!(theta_min >= 0.0) || !(theta_min <= theta_max) || !(theta_max <= std::numbers::pi))
    throw ValidationError("pose range: theta interval must lie in [0, pi]");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("pose range: t_max must be >= 0");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Sim2Pose sample_pose(const PoseRange& range, std::uint64_t seed) {
  range.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Sim2Pose p;
  p.scale = range.log_uniform_scale
                ? std::exp(between(std::log(range.scale_min), std::log(range.scale_max)))
                : between(range.scale_min, range.scale_max);
  p.theta = between(range.theta_min, range.theta_max);
  p.tx = between(-range.t_max, range.t_max);
  p.ty = between(-range.t_max, range.t_max);
  return p;
}

RandomizedPair inject_original_only(const Image& original, const PoseRange& range, std::uint64_t seed) {
  const Sim2Pose xi = sample_pose(range, seed);
  return {original, warp(original, xi), xi, seed};
}

InjectedBoth inject_both(const Image& original, const Image& target, const PoseRange& range,
                         std::uint64_t seed) {
  if (!original.same_shape(target)) throw ValidationError("inject_both: dimension mismatch");
  const Sim2Pose xi = sample_pose(range, seed);
  return {warp(original, xi), warp(target, xi), xi};
}

}  // namespace weakpair
