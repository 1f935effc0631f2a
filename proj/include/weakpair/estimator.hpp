#pragma once

#include "weakpair/geometry.hpp"
#include "weakpair/image.hpp"
#include "weakpair/logpolar.hpp"
#include "weakpair/phasecorr.hpp"

namespace weakpair {

enum class Readout { soft, hard };

struct EstimatorOptions {
  Readout mode = Readout::soft;
  double beta = 300.0;
  int n_theta = 0;  // 0: image side length
  int n_rho = 0;    // 0: image side length
  bool window = true;
  bool highpass = true;
  double low_confidence_peak = 0.05;
};

struct RotScaleEstimate {
  double theta = 0.0;  // radians in [0, pi)
  double scale = 1.0;
  BinCoord bins;       // readout location on the log-polar correlation grid
  PoseDistribution dist;
  double peak = 0.0;   // raw correlation maximum
  double rho_base = 1.0;
  bool low_confidence = false;
};

struct TranslationEstimate {
  double tx = 0.0;
  double ty = 0.0;
  PoseDistribution dist;
  double peak = 0.0;
};

struct PoseEstimate {
  Sim2Pose pose;  // warp(moving, pose) ~ fixed; theta in [0, 2*pi)
  PoseDistribution rot_scale_dist;
  PoseDistribution trans_dist;
  double rot_scale_peak = 0.0;
  double trans_peak = 0.0;
  bool low_confidence = false;
  Image rotated;  // moving after the rotation/scale stage, before translation
};

/// Log-polar map of the conditioned magnitude spectrum of `img`.
LogPolarGrid spectrum_logpolar(const Image& img, const EstimatorOptions& opts);

/// Maps a pose's rotation/scale to bin coordinates on the log-polar
/// correlation grid that estimate_rot_scale reads from.
BinCoord rot_scale_bins(double theta, double scale, int n_theta, int n_rho, double rho_base);

/// Rotation and scale taking `moving` onto `fixed`.
RotScaleEstimate estimate_rot_scale(const Image& moving, const Image& fixed,
                                    const EstimatorOptions& opts = {});

/// Shift taking `moving` onto `fixed`.
TranslationEstimate estimate_translation(const Image& moving, const Image& fixed,
                                         const EstimatorOptions& opts = {});

/// Two-stage similarity estimate: rotation/scale, resample, then translation.
/// Both theta and theta + pi are tried at the second stage; the one with the
/// stronger translation peak is kept.
PoseEstimate estimate_sim2(const Image& moving, const Image& fixed,
                           const EstimatorOptions& opts = {});

Image apply_estimate(const Image& moving, const PoseEstimate& est);

}  // namespace weakpair
