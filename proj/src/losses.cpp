#include "weakpair/losses.hpp"

#include <algorithm>
#include <cmath>

#include "weakpair/error.hpp"

namespace weakpair {

double l1_masked(const Image& a, const Image& b, const Mask& mask) {
  if (!a.same_shape(b) || a.width() != mask.width() || a.height() != mask.height())
    throw ValidationError("l1_masked: dimension mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sum += std::abs(a.at(x, y) - b.at(x, y));
      ++n;
    }
  }
  if (n == 0) throw ValidationError("l1_masked: empty mask");
  return sum / static_cast<double>(n);
}

double kld(const PoseDistribution& p, const PoseDistribution& q) {
  if (!p.probs.same_shape(q.probs)) throw ValidationError("kld: shape mismatch");
  const auto pp = p.probs.pixels();
  const auto qq = q.probs.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i] <= 0.0) continue;
    const double a = std::max(pp[i], kProbabilityFloor);
    const double b = std::max(qq[i], kProbabilityFloor);
    sum += pp[i] * std::log(a / b);
  }
  return std::max(sum, 0.0);
}

PoseDistribution onepeak_target(int width, int height, BinCoord center, double sigma, AxisKind kind) {
  if (width <= 0 || height <= 0) throw ValidationError("onepeak_target: empty shape");
  if (!(sigma >= 0.0)) throw ValidationError("onepeak_target: sigma must be >= 0");
  if (kind == AxisKind::logpolar) center.row = wrap_angle(center.row, height);
  if (!(center.row >= 0.0 && center.row <= height - 1 + (kind == AxisKind::logpolar ? 1.0 : 0.0)) ||
      !(center.col >= 0.0 && center.col <= width - 1))
    throw ValidationError("onepeak_target: center outside grid");

  Image probs(width, height, 0.0);
  if (sigma == 0.0) {
    const int r = static_cast<int>(std::lround(center.row)) % height;
    const int c = static_cast<int>(std::lround(center.col));
    probs.at(c, r) = 1.0;
    return {std::move(probs), kind};
  }

  double total = 0.0;
  for (int y = 0; y < height; ++y) {
    double dy = y - center.row;
    if (kind == AxisKind::logpolar) {
      dy = std::abs(dy);
      dy = std::min(dy, height - dy);
    }
    for (int x = 0; x < width; ++x) {
      const double dx = x - center.col;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      probs.at(x, y) = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw ValidationError("onepeak_target: degenerate target");
  for (double& v : probs.pixels()) v /= total;
  return {std::move(probs), kind};
}

double loss_xi_r(const Image& fake_t, const Image& fake_t_rand, const Sim2Pose& xi_r,
                 const EstimatorOptions& opts, double sigma) {
  const RotScaleEstimate est = estimate_rot_scale(fake_t, fake_t_rand, opts);
  const int n_theta = est.dist.height();
  const int n_rho = est.dist.width();
  const BinCoord bins = rot_scale_bins(xi_r.theta, xi_r.scale, n_theta, n_rho, est.rho_base);
  return kld(est.dist, onepeak_target(n_rho, n_theta, bins, sigma, AxisKind::logpolar));
}

double loss_theta_s(const Image& fake_t, const Image& target, const Image& fake_t_rand,
                    const Image& target_rand, const EstimatorOptions& opts) {
  const RotScaleEstimate a = estimate_rot_scale(fake_t, target, opts);
  const RotScaleEstimate b = estimate_rot_scale(fake_t_rand, target_rand, opts);
  return kld(a.dist, b.dist);
}

double realness_bce(double score, bool label) {
  const double s = std::clamp(score, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return label ? -std::log(s) : -std::log(1.0 - s);
}

RealnessScorer constant_scorer(double score) {
  return [score](const Image&) { return score; };
}

void LossWeights::validate() const {
  for (double w : {trans, cycle, realness_g, realness_d, xi_r, theta_s})
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("loss weights must be finite and >= 0");
}

LossReport aggregate(const LossTerms& terms, const LossWeights& weights, LossMode mode) {
  weights.validate();
  LossReport r;
  r.weights = weights;
  r.mode = mode;
  r.l_trans = terms.l_trans;
  r.l_cycle = terms.l_cycle;
  r.l_realness_g = terms.l_realness_g;
  r.l_realness_d = terms.l_realness_d;
  if (mode == LossMode::full) {
    r.l_xi_r = terms.l_xi_r;
    r.l_theta_s = terms.l_theta_s;
  }
  r.total_basic = weights.trans * r.l_trans + weights.cycle * r.l_cycle +
                  weights.realness_g * r.l_realness_g + weights.realness_d * r.l_realness_d;
  r.total_full = r.total_basic + weights.xi_r * r.l_xi_r + weights.theta_s * r.l_theta_s;
  return r;
}

LossReport mean_report(const std::vector<LossReport>& reports) {
  if (reports.empty()) throw ValidationError("mean_report: no reports");
  LossTerms t;
  bool low = false;
  for (const auto& r : reports) {
    t.l_trans += r.l_trans;
    t.l_cycle += r.l_cycle;
    t.l_realness_g += r.l_realness_g;
    t.l_realness_d += r.l_realness_d;
    t.l_xi_r += r.l_xi_r;
    t.l_theta_s += r.l_theta_s;
    low = low || r.low_confidence;
  }
  const double n = static_cast<double>(reports.size());
  for (double* v : {&t.l_trans, &t.l_cycle, &t.l_realness_g, &t.l_realness_d, &t.l_xi_r, &t.l_theta_s})
    *v /= n;
  LossReport out = aggregate(t, reports.front().weights, reports.front().mode);
  out.low_confidence = low;
  return out;
}

nlohmann::json to_json(const LossReport& r) {
  return {{"l_trans", r.l_trans},         {"l_cycle", r.l_cycle},
          {"l_realness_g", r.l_realness_g}, {"l_realness_d", r.l_realness_d},
          {"l_xi_r", r.l_xi_r},           {"l_theta_s", r.l_theta_s},
          {"total_basic", r.total_basic}, {"total_full", r.total_full}};
}

}  // namespace weakpair
