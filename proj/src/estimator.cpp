#include "weakpair/estimator.hpp"

#include <cmath>
#include <numbers>

#include "weakpair/error.hpp"
#include "weakpair/spectral.hpp"

namespace weakpair {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) throw ValidationError(std::string(what) + ": dimension mismatch");
  if (a.empty()) throw ValidationError(std::string(what) + ": empty image");
}

int side_or(int requested, const Image& img) {
  return requested > 0 ? requested : std::min(img.width(), img.height());
}

BinCoord read_out(const Grid& corr, const PoseDistribution& dist, Readout mode) {
  if (mode == Readout::soft) return expectation(dist);
  const Peak p = argmax_refined(corr);
  return {p.row, p.col};
}

double max_value(const Grid& g) {
  const auto px = g.pixels();
  return *std::max_element(px.begin(), px.end());
}

}  // namespace

LogPolarGrid spectrum_logpolar(const Image& img, const EstimatorOptions& opts) {
  Image mag = magnitude_centered(rfft2(opts.window ? window_hann(img) : img));
  if (opts.highpass) mag = highpass(mag);
  return to_logpolar(mag, side_or(opts.n_theta, img), side_or(opts.n_rho, img));
}

BinCoord rot_scale_bins(double theta, double scale, int n_theta, int n_rho, double rho_base) {
  // Rotation is only observable modulo pi on the half-turn grid.
  double half = wrap_angle(theta, std::numbers::pi);
  if (half >= 0.5 * std::numbers::pi) half -= std::numbers::pi;
  BinCoord b;
  b.row = wrap_angle(n_theta / 2 + half * n_theta / std::numbers::pi, n_theta);
  b.col = n_rho / 2 + std::log(scale) / std::log(rho_base);
  return b;
}

RotScaleEstimate estimate_rot_scale(const Image& moving, const Image& fixed,
                                    const EstimatorOptions& opts) {
  require_same_shape(moving, fixed, "estimate_rot_scale");
  const LogPolarGrid lp_moving = spectrum_logpolar(moving, opts);
  const LogPolarGrid lp_fixed = spectrum_logpolar(fixed, opts);
  // A fixed image rotated by theta and scaled by s relative to moving has
  // its spectrum rotated by theta and shrunk by s, which shifts the moving
  // grid by (+theta, +log s) relative to the fixed one.
  const Grid corr = correlate(lp_moving.values, lp_fixed.values);

  RotScaleEstimate est;
  est.dist = to_distribution(corr, opts.beta, AxisKind::logpolar);
  est.bins = read_out(corr, est.dist, opts.mode);
  est.peak = max_value(corr);
  est.rho_base = lp_moving.rho_base;
  est.low_confidence = est.peak < opts.low_confidence_peak;

  const int n_theta = lp_moving.n_theta;
  const int n_rho = lp_moving.n_rho;
  est.theta = wrap_angle((est.bins.row - n_theta / 2) * std::numbers::pi / n_theta, std::numbers::pi);
  est.scale = std::pow(lp_moving.rho_base, est.bins.col - n_rho / 2);
  return est;
}

TranslationEstimate estimate_translation(const Image& moving, const Image& fixed,
                                         const EstimatorOptions& opts) {
  require_same_shape(moving, fixed, "estimate_translation");
  const Grid corr = opts.window ? correlate(window_hann(fixed), window_hann(moving))
                                : correlate(fixed, moving);
  TranslationEstimate est;
  est.dist = to_distribution(corr, opts.beta, AxisKind::translation);
  const BinCoord b = read_out(corr, est.dist, opts.mode);
  est.tx = b.col - corr.width() / 2;
  est.ty = b.row - corr.height() / 2;
  est.peak = max_value(corr);
  return est;
}

PoseEstimate estimate_sim2(const Image& moving, const Image& fixed, const EstimatorOptions& opts) {
  require_same_shape(moving, fixed, "estimate_sim2");
  const RotScaleEstimate rs = estimate_rot_scale(moving, fixed, opts);

  PoseEstimate best;
  bool have = false;
  for (const double theta : {rs.theta, rs.theta + std::numbers::pi}) {
    const Sim2Pose rot{rs.scale, theta, 0.0, 0.0};
    Image rotated = warp(moving, rot);
    TranslationEstimate tr = estimate_translation(rotated, fixed, opts);
    if (have && !(tr.peak > best.trans_peak)) continue;
    best.pose = {rs.scale, theta, tr.tx, tr.ty};
    best.trans_dist = std::move(tr.dist);
    best.trans_peak = tr.peak;
    best.rotated = std::move(rotated);
    have = true;
  }
  best.rot_scale_dist = rs.dist;
  best.rot_scale_peak = rs.peak;
  best.low_confidence = rs.low_confidence;
  return best;
}

Image apply_estimate(const Image& moving, const PoseEstimate& est) { return warp(moving, est.pose); }

}  // namespace weakpair
