#pragma once

#include "weakpair/image.hpp"

namespace weakpair {

/// Similarity transform: uniform scale, rotation, translation.
///
/// Acts on pixel coordinates about the image center c = ((W-1)/2, (H-1)/2):
///   q = s * R(theta) * (p - c) + c + t
/// with x pointing right and y pointing down. Positive theta turns the image
/// counter-clockwise as displayed (row 0 at the top), so in (x, y_down)
/// coordinates R(theta) = [[cos, sin], [-sin, cos]].
struct Sim2Pose {
  double scale = 1.0;
  double theta = 0.0;  // radians
  double tx = 0.0;     // pixels, +x is right
  double ty = 0.0;     // pixels, +y is down

  static Sim2Pose identity() { return {}; }
  bool finite() const;
};

/// Linear part and translation of a pose in center-relative coordinates.
struct Affine2 {
  double a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]
  double tx = 0, ty = 0;
};

Affine2 to_affine(const Sim2Pose& p);
Sim2Pose from_affine(const Affine2& m);

/// Matrix product: applying the result equals applying `b` first, then `a`.
/// The returned theta lies in (-pi, pi].
Sim2Pose compose(const Sim2Pose& a, const Sim2Pose& b);
Sim2Pose inverse(const Sim2Pose& p);

/// Inverse-mapped bilinear resampling. Output keeps the input dimensions;
/// samples falling outside the source read 0. Throws ValidationError on an
/// empty image or a non-finite pose.
Image warp(const Image& img, const Sim2Pose& pose);

/// True where warping by `pose_a` and by `pose_b` both sample inside a
/// source frame of the given size.
Mask overlap_mask(int width, int height, const Sim2Pose& pose_a, const Sim2Pose& pose_b);

/// Shorthand for overlap_mask(w, h, pose, pose).
Mask valid_mask(int width, int height, const Sim2Pose& pose);

// Wraps an angle into [0, period).
double wrap_angle(double angle, double period);

// Smallest absolute difference between two angles modulo `period`.
double angle_distance(double a, double b, double period);

}  // namespace weakpair
