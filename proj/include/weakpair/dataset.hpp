#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "weakpair/geometry.hpp"
#include "weakpair/image.hpp"
#include "weakpair/randomization.hpp"

namespace weakpair {

/// Appearance corruption f: disruption kernel, Gaussian blur, gain and bias.
struct StyleSpec {
  std::string id = "style0";
  double blur_sigma = 1.0;
  Image kernel;  // odd k x k; empty means identity
  double gain = 0.9;
  double bias = 0.05;
  std::uint64_t seed = 0;

  static StyleSpec identity();
  /// Pointwise gain/bias only (no kernel, no blur).
  static StyleSpec pointwise(double gain, double bias);
  /// Seeded 3x3 disruption kernel with positive entries summing to 1.
  static StyleSpec disrupted(std::uint64_t seed, double blur_sigma = 1.0, double gain = 0.9,
                             double bias = 0.05);
};

nlohmann::json to_json(const StyleSpec& spec);
StyleSpec style_from_json(const std::string& id, const nlohmann::json& j);
nlohmann::json to_json(const PoseRange& range);
PoseRange pose_range_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Sim2Pose& pose);
Sim2Pose pose_from_json(const nlohmann::json& j);

/// True 2D convolution with edge replication.
Image convolve_replicate(const Image& img, const Image& kernel);

/// Separable Gaussian blur with edge replication; sigma 0 is a no-op.
Image gaussian_blur(const Image& img, double sigma);

/// Kernel, then blur, then gain * x + bias, then clamp to [0,1].
/// Throws ValidationError on an even-sized kernel.
Image apply_style(const Image& img, const StyleSpec& spec);

/// Same as apply_style but without the final clamp.
Image apply_style_unclamped(const Image& img, const StyleSpec& spec);

struct WeakPairRecord {
  std::string id;
  std::string original;  // path relative to the manifest
  std::string target;
  std::string style_id;
  std::uint64_t seed = 0;
};

struct WeakPair {
  Image original;
  Image target;  // warp(apply_style(original), xi)
  Sim2Pose xi;   // ground truth, eval-only
  WeakPairRecord record;
};

/// target = warp(apply_style(img), sample_pose(range, seed)).
WeakPair make_pair(const Image& img, const StyleSpec& spec, const PoseRange& range, std::uint64_t seed);

struct Manifest {
  std::vector<WeakPairRecord> pairs;
  std::vector<StyleSpec> styles;
  PoseRange pose_range;
  std::vector<Sim2Pose> xi;  // eval manifest only, parallel to pairs
  std::filesystem::path base_dir;

  const StyleSpec& style(const std::string& id) const;
};

struct CorpusPaths {
  std::filesystem::path manifest;
  std::filesystem::path eval_manifest;
};

/// Every .pgm/.png in `source_dir`, sorted by file name.
std::vector<Image> load_sources(const std::filesystem::path& source_dir);

/// Writes n pairs under `out_dir` (images/ + manifest.json +
/// eval_manifest.json). Pair i uses source i % sources.size() and seed
/// derive_seed(seed, i). Originals are stored 8-bit; targets are computed
/// from the stored original so regeneration is bit-exact.
CorpusPaths generate_corpus(const std::vector<Image>& sources, const std::filesystem::path& out_dir,
                            const StyleSpec& spec, const PoseRange& range, int n, std::uint64_t seed);

Manifest read_manifest(const std::filesystem::path& path);

/// Recomputes the target of pair `index` from its stored original.
Image regenerate_target(const Manifest& manifest, std::size_t index);

/// Stable JSON text (sorted keys, 2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace weakpair
