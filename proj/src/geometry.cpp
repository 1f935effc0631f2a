#include "weakpair/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakpair/error.hpp"

namespace weakpair {

bool Sim2Pose::finite() const {
  return std::isfinite(scale) && std::isfinite(theta) && std::isfinite(tx) && std::isfinite(ty);
}

Affine2 to_affine(const Sim2Pose& p) {
  const double cs = p.scale * std::cos(p.theta);
  const double sn = p.scale * std::sin(p.theta);
  return {cs, sn, -sn, cs, p.tx, p.ty};
}

Sim2Pose from_affine(const Affine2& m) {
  Sim2Pose p;
  p.scale = std::hypot(m.a, m.b);
  p.theta = std::atan2(m.b, m.a);
  p.tx = m.tx;
  p.ty = m.ty;
  return p;
}

Sim2Pose compose(const Sim2Pose& a, const Sim2Pose& b) {
  const Affine2 ma = to_affine(a);
  const Affine2 mb = to_affine(b);
  Affine2 m;
  m.a = ma.a * mb.a + ma.b * mb.c;
  m.b = ma.a * mb.b + ma.b * mb.d;
  m.c = ma.c * mb.a + ma.d * mb.c;
  m.d = ma.c * mb.b + ma.d * mb.d;
  m.tx = ma.a * mb.tx + ma.b * mb.ty + ma.tx;
  m.ty = ma.c * mb.tx + ma.d * mb.ty + ma.ty;
  return from_affine(m);
}

Sim2Pose inverse(const Sim2Pose& p) {
  if (!(p.scale > 0.0)) throw ValidationError("pose scale must be positive");
  const Affine2 m = to_affine(p);
  const double det = m.a * m.d - m.b * m.c;
  Affine2 inv;
  inv.a = m.d / det;
  inv.b = -m.b / det;
  inv.c = -m.c / det;
  inv.d = m.a / det;
  inv.tx = -(inv.a * m.tx + inv.b * m.ty);
  inv.ty = -(inv.c * m.tx + inv.d * m.ty);
  return from_affine(inv);
}

namespace {

// Maps output pixel q to the source location it samples.
struct InverseMap {
  Affine2 inv;
  double cx, cy;

  InverseMap(int width, int height, const Sim2Pose& pose)
      : inv(to_affine(inverse(pose))), cx(0.5 * (width - 1)), cy(0.5 * (height - 1)) {}

  void operator()(int x, int y, double& sx, double& sy) const {
    const double u = x - cx;
    const double v = y - cy;
    sx = inv.a * u + inv.b * v + inv.tx + cx;
    sy = inv.c * u + inv.d * v + inv.ty + cy;
  }
};

bool inside(double sx, double sy, int width, int height) {
  return sx >= 0.0 && sy >= 0.0 && sx <= width - 1 && sy <= height - 1;
}

}  // namespace

Image warp(const Image& img, const Sim2Pose& pose) {
  if (img.empty()) throw ValidationError("warp: empty image");
  if (!pose.finite()) throw ValidationError("warp: non-finite pose");
  if (!(pose.scale > 0.0)) throw ValidationError("warp: scale must be positive");

  const int w = img.width();
  const int h = img.height();
  const InverseMap map(w, h, pose);
  Image out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx, sy;
      map(x, y, sx, sy);
      if (!inside(sx, sy, w, h)) continue;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      const int x1 = x0 + 1 < w ? x0 + 1 : x0;
      const int y1 = y0 + 1 < h ? y0 + 1 : y0;
      const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
      const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
      out.at(x, y) = top * (1.0 - fy) + bot * fy;
    }
  }
  return out;
}

Mask overlap_mask(int width, int height, const Sim2Pose& pose_a, const Sim2Pose& pose_b) {
  const InverseMap ma(width, height, pose_a);
  const InverseMap mb(width, height, pose_b);
  Mask out(width, height, false);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double ax, ay, bx, by;
      ma(x, y, ax, ay);
      mb(x, y, bx, by);
      out.set(x, y, inside(ax, ay, width, height) && inside(bx, by, width, height));
    }
  }
  return out;
}

Mask valid_mask(int width, int height, const Sim2Pose& pose) {
  return overlap_mask(width, height, pose, pose);
}

double wrap_angle(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double angle_distance(double a, double b, double period) {
  const double d = wrap_angle(a - b, period);
  return std::min(d, period - d);
}

}  // namespace weakpair
