#include "weakpair/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "weakpair/error.hpp"
#include "weakpair/image_io.hpp"

namespace weakpair {

StyleSpec StyleSpec::identity() {
  StyleSpec s;
  s.id = "identity";
  s.blur_sigma = 0.0;
  s.gain = 1.0;
  s.bias = 0.0;
  return s;
}

StyleSpec StyleSpec::pointwise(double gain, double bias) {
  StyleSpec s = identity();
  s.id = "pointwise";
  s.gain = gain;
  s.bias = bias;
  return s;
}

StyleSpec StyleSpec::disrupted(std::uint64_t seed, double blur_sigma, double gain, double bias) {
  StyleSpec s;
  s.id = "disrupted";
  s.seed = seed;
  s.blur_sigma = blur_sigma;
  s.gain = gain;
  s.bias = bias;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xd15u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  s.kernel = Image(3, 3);
  double total = 0.0;
  for (double& v : s.kernel.pixels()) total += (v = unit(rng));
  for (double& v : s.kernel.pixels()) v /= total;
  return s;
}

nlohmann::json to_json(const StyleSpec& spec) {
  nlohmann::json kernel = nlohmann::json::array();
  for (int y = 0; y < spec.kernel.height(); ++y) {
    nlohmann::json row = nlohmann::json::array();
    for (int x = 0; x < spec.kernel.width(); ++x) row.push_back(spec.kernel.at(x, y));
    kernel.push_back(row);
  }
  return {{"blur_sigma", spec.blur_sigma}, {"kernel", kernel}, {"gain", spec.gain},
          {"bias", spec.bias},             {"seed", spec.seed}};
}

StyleSpec style_from_json(const std::string& id, const nlohmann::json& j) {
  StyleSpec s;
  s.id = id;
  s.blur_sigma = j.at("blur_sigma").get<double>();
  s.gain = j.at("gain").get<double>();
  s.bias = j.at("bias").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  const auto& k = j.at("kernel");
  if (!k.empty()) {
    const int n = static_cast<int>(k.size());
    s.kernel = Image(n, n);
    for (int y = 0; y < n; ++y) {
      if (static_cast<int>(k[y].size()) != n) throw ValidationError("style kernel must be square");
      for (int x = 0; x < n; ++x) s.kernel.at(x, y) = k[y][x].get<double>();
    }
  }
  return s;
}

nlohmann::json to_json(const PoseRange& r) {
  return {{"scale_min", r.scale_min}, {"scale_max", r.scale_max},
          {"theta_min", r.theta_min}, {"theta_max", r.theta_max},
          {"t_max", r.t_max},         {"log_uniform_scale", r.log_uniform_scale}};
}

PoseRange pose_range_from_json(const nlohmann::json& j) {
  PoseRange r;
  r.scale_min = j.at("scale_min").get<double>();
  r.scale_max = j.at("scale_max").get<double>();
  r.theta_min = j.at("theta_min").get<double>();
  r.theta_max = j.at("theta_max").get<double>();
  r.t_max = j.at("t_max").get<double>();
  r.log_uniform_scale = j.value("log_uniform_scale", false);
  r.validate();
  return r;
}

nlohmann::json to_json(const Sim2Pose& p) {
  return {{"s", p.scale}, {"theta", p.theta}, {"tx", p.tx}, {"ty", p.ty}};
}

Sim2Pose pose_from_json(const nlohmann::json& j) {
  return {j.at("s").get<double>(), j.at("theta").get<double>(), j.at("tx").get<double>(),
          j.at("ty").get<double>()};
}

Image convolve_replicate(const Image& img, const Image& kernel) {
  if (kernel.empty()) return img;
  if (kernel.width() % 2 == 0 || kernel.height() % 2 == 0)
    throw ValidationError("convolution kernel size must be odd");
  const int rx = kernel.width() / 2;
  const int ry = kernel.height() / 2;
  const int w = img.width();
  const int h = img.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -ry; j <= ry; ++j) {
        const int sy = std::clamp(y - j, 0, h - 1);
        for (int i = -rx; i <= rx; ++i) {
          const int sx = std::clamp(x - i, 0, w - 1);
          acc += kernel.at(i + rx, j + ry) * img.at(sx, sy);
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i)
    total += (taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma)));
  for (double& t : taps) t /= total;

  const int w = img.width();
  const int h = img.height();
  Image tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += taps[i + radius] * img.at(std::clamp(x + i, 0, w - 1), y);
      tmp.at(x, y) = acc;
    }
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += taps[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1));
      out.at(x, y) = acc;
    }
  return out;
}

Image apply_style_unclamped(const Image& img, const StyleSpec& spec) {
  Image out = gaussian_blur(convolve_replicate(img, spec.kernel), spec.blur_sigma);
  for (double& v : out.pixels()) v = spec.gain * v + spec.bias;
  return out;
}

Image apply_style(const Image& img, const StyleSpec& spec) {
  return clamped01(apply_style_unclamped(img, spec));
}

WeakPair make_pair(const Image& img, const StyleSpec& spec, const PoseRange& range, std::uint64_t seed) {
  WeakPair pair;
  pair.original = img;
  pair.xi = sample_pose(range, seed);
  pair.target = warp(apply_style(img, spec), pair.xi);
  pair.record.style_id = spec.id;
  pair.record.seed = seed;
  return pair;
}

const StyleSpec& Manifest::style(const std::string& id) const {
  for (const auto& s : styles)
    if (s.id == id) return s;
  throw ValidationError("manifest: unknown style id " + id);
}

std::vector<Image> load_sources(const std::filesystem::path& source_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(source_dir, ec)) throw IoError("not a directory: " + source_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(source_dir)) {
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".png")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .pgm/.png images in " + source_dir.string());
  std::vector<Image> out;
  for (const auto& f : files) out.push_back(read_image(f));
  return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

CorpusPaths generate_corpus(const std::vector<Image>& sources, const std::filesystem::path& out_dir,
                            const StyleSpec& spec, const PoseRange& range, int n, std::uint64_t seed) {
  namespace fs = std::filesystem;
  if (n < 0) throw ValidationError("corpus size must be >= 0");
  if (n > 0 && sources.empty()) throw ValidationError("corpus needs at least one source image");
  range.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "images").string());

  nlohmann::json pairs = nlohmann::json::array();
  nlohmann::json eval_pairs = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "pair_%04d", i);
    const std::uint64_t pair_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    const Image original = quantize8(sources[static_cast<std::size_t>(i) % sources.size()]);
    WeakPair pair = make_pair(original, spec, range, pair_seed);
    pair.record.id = id;
    pair.record.original = std::string("images/") + id + "_original.pgm";
    pair.record.target = std::string("images/") + id + "_target.pgm";
    write_pgm(out_dir / pair.record.original, pair.original);
    write_pgm(out_dir / pair.record.target, pair.target);

    nlohmann::json rec = {{"id", pair.record.id},
                          {"original", pair.record.original},
                          {"target", pair.record.target},
                          {"style_id", pair.record.style_id},
                          {"seed", pair.record.seed}};
    pairs.push_back(rec);
    rec["xi"] = to_json(pair.xi);
    eval_pairs.push_back(rec);
  }

  nlohmann::json manifest = {{"pairs", pairs},
                             {"style_specs", {{spec.id, to_json(spec)}}},
                             {"pose_range", to_json(range)}};
  nlohmann::json eval = manifest;
  eval["pairs"] = eval_pairs;

  CorpusPaths paths{out_dir / "manifest.json", out_dir / "eval_manifest.json"};
  write_text(paths.manifest, dump_json(manifest));
  write_text(paths.eval_manifest, dump_json(eval));
  return paths;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  Manifest m;
  m.base_dir = path.parent_path();
  try {
    for (const auto& [id, spec] : j.at("style_specs").items()) m.styles.push_back(style_from_json(id, spec));
    m.pose_range = pose_range_from_json(j.at("pose_range"));
    for (const auto& p : j.at("pairs")) {
      m.pairs.push_back({p.at("id").get<std::string>(), p.at("original").get<std::string>(),
                         p.at("target").get<std::string>(), p.at("style_id").get<std::string>(),
                         p.at("seed").get<std::uint64_t>()});
      if (p.contains("xi")) m.xi.push_back(pose_from_json(p.at("xi")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest schema error in " + path.string() + ": " + e.what());
  }
  if (!m.xi.empty() && m.xi.size() != m.pairs.size())
    throw ValidationError("eval manifest: some pairs lack xi");
  return m;
}

Image regenerate_target(const Manifest& manifest, std::size_t index) {
  const WeakPairRecord& rec = manifest.pairs.at(index);
  const Image original = read_pgm(manifest.base_dir / rec.original);
  return make_pair(original, manifest.style(rec.style_id), manifest.pose_range, rec.seed).target;
}

}  // namespace weakpair
