#include "weakpair/image.hpp"

#include <algorithm>

#include "weakpair/error.hpp"

namespace weakpair {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ValidationError("image dimensions must be non-negative");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ValidationError("mask dimensions must be non-negative");
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask Mask::operator&(const Mask& other) const {
  if (width_ != other.width_ || height_ != other.height_)
    throw ValidationError("mask shape mismatch");
  Mask out(width_, height_, false);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
  return out;
}

Mask Mask::eroded(int radius) const {
  if (radius <= 0) return *this;
  // Separable min filter; pixels near the frame edge count as outside.
  Mask rows(width_, height_, false);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      bool ok = true;
      for (int dx = -radius; dx <= radius && ok; ++dx) {
        const int xx = x + dx;
        ok = xx >= 0 && xx < width_ && at(xx, y);
      }
      rows.set(x, y, ok);
    }
  }
  Mask out(width_, height_, false);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      bool ok = true;
      for (int dy = -radius; dy <= radius && ok; ++dy) {
        const int yy = y + dy;
        ok = yy >= 0 && yy < height_ && rows.at(x, yy);
      }
      out.set(x, y, ok);
    }
  }
  return out;
}

Image clamped01(Image img) {
  for (double& v : img.pixels()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace weakpair
