#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace weakpair {

/// Single-channel row-major grid of doubles.
///
/// Used for images (intensities nominally in [0,1]) as well as for
/// correlation surfaces and probability grids, which share the layout.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

using Grid = Image;

/// Boolean validity grid, same layout as Image.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = true);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

  std::size_t count() const;
  Mask operator&(const Mask& other) const;

  /// Shrinks the true region by `radius` pixels (square structuring element).
  Mask eroded(int radius) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Clamps every pixel to [0,1].
Image clamped01(Image img);

}  // namespace weakpair
