#include "weakpair/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "weakpair/error.hpp"

namespace weakpair {

namespace {

struct Blob {
  double x, y, radius, amplitude;
};

struct Stroke {
  double x0, y0, x1, y1, half_width, level;
};

struct Block {
  double cx, cy, half_w, half_h, cos_a, sin_a, level;
};

double segment_distance(double px, double py, const Stroke& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0.0 ? std::clamp(((px - s.x0) * dx + (py - s.y0) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (s.x0 + t * dx), py - (s.y0 + t * dy));
}

}  // namespace

Image render_scene(int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw ValidationError("render_scene: empty frame");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5ce7eu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double side = std::min(width, height);

  std::vector<Blob> blobs(12);
  for (auto& b : blobs)
    b = {unit(rng) * width, unit(rng) * height, (0.08 + 0.2 * unit(rng)) * side, unit(rng) - 0.5};

  std::vector<Stroke> strokes(6 + static_cast<int>(unit(rng) * 4));
  for (auto& s : strokes) {
    const double a = unit(rng) * std::numbers::pi;
    const double len = (0.3 + 0.6 * unit(rng)) * side;
    const double mx = unit(rng) * width;
    const double my = unit(rng) * height;
    s = {mx - 0.5 * len * std::cos(a), my - 0.5 * len * std::sin(a),
         mx + 0.5 * len * std::cos(a), my + 0.5 * len * std::sin(a),
         (0.006 + 0.012 * unit(rng)) * side, 0.55 + 0.45 * unit(rng)};
  }

  std::vector<Block> blocks(14 + static_cast<int>(unit(rng) * 8));
  for (auto& b : blocks) {
    const double a = unit(rng) * std::numbers::pi;
    b = {unit(rng) * width, unit(rng) * height, (0.02 + 0.06 * unit(rng)) * side,
         (0.02 + 0.06 * unit(rng)) * side, std::cos(a), std::sin(a), unit(rng)};
  }

  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.4;
      for (const auto& b : blobs) {
        const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
        v += 0.5 * b.amplitude * std::exp(-d2 / (2.0 * b.radius * b.radius));
      }
      for (const auto& b : blocks) {
        const double u = (x - b.cx) * b.cos_a + (y - b.cy) * b.sin_a;
        const double w = -(x - b.cx) * b.sin_a + (y - b.cy) * b.cos_a;
        if (std::abs(u) <= b.half_w && std::abs(w) <= b.half_h) v = 0.5 * v + 0.5 * b.level;
      }
      for (const auto& s : strokes) {
        const double d = segment_distance(x, y, s);
        if (d <= s.half_width + 1.0) {
          const double cover = std::clamp(s.half_width + 0.5 - d, 0.0, 1.0);
          v = (1.0 - cover) * v + cover * s.level;
        }
      }
      img.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace weakpair
