#pragma once

#include <functional>
#include <string>

#include "json.hpp"

#include "weakpair/estimator.hpp"
#include "weakpair/geometry.hpp"
#include "weakpair/image.hpp"
#include "weakpair/phasecorr.hpp"

namespace weakpair {

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kDefaultPeakSigma = 1.5;

/// Mean |a - b| over the pixels where `mask` is true.
double l1_masked(const Image& a, const Image& b, const Mask& mask);

/// Sum p ln(p / q), both floored at 1e-12. Never negative.
double kld(const PoseDistribution& p, const PoseDistribution& q);

/// Normalized isotropic Gaussian centered at `center` (bins). Rows wrap when
/// `kind` is logpolar. sigma == 0 yields a delta at the nearest bin.
PoseDistribution onepeak_target(int width, int height, BinCoord center, double sigma, AxisKind kind);

/// KLD between the rotation/scale distribution of (fake_t -> fake_t_rand)
/// and a one-peak target at xi_r's rotation/scale bins.
double loss_xi_r(const Image& fake_t, const Image& fake_t_rand, const Sim2Pose& xi_r,
                 const EstimatorOptions& opts = {}, double sigma = kDefaultPeakSigma);

/// KLD between the rotation/scale distributions of (fake_t -> target) and
/// (fake_t_rand -> target_rand).
double loss_theta_s(const Image& fake_t, const Image& target, const Image& fake_t_rand,
                    const Image& target_rand, const EstimatorOptions& opts = {});

/// Binary cross-entropy of a realness score against its label.
double realness_bce(double score, bool label);

/// Maps an image to a realness score in (0,1).
using RealnessScorer = std::function<double(const Image&)>;

/// The shipped scorer: always 0.5.
RealnessScorer constant_scorer(double score = 0.5);

enum class LossMode { basic, full };

struct LossWeights {
  double trans = 1.0;
  double cycle = 1.0;
  double realness_g = 1.0;
  double realness_d = 1.0;
  double xi_r = 1.0;
  double theta_s = 1.0;

  void validate() const;
};

struct LossTerms {
  double l_trans = 0.0;
  double l_cycle = 0.0;
  double l_realness_g = 0.0;
  double l_realness_d = 0.0;
  double l_xi_r = 0.0;
  double l_theta_s = 0.0;
};

struct LossReport {
  double l_trans = 0.0;
  double l_cycle = 0.0;
  double l_realness_g = 0.0;
  double l_realness_d = 0.0;
  double l_xi_r = 0.0;
  double l_theta_s = 0.0;
  double total_basic = 0.0;
  double total_full = 0.0;
  LossWeights weights;
  LossMode mode = LossMode::basic;
  bool low_confidence = false;

  /// The optimized objective: total_full in full mode, total_basic otherwise.
  double objective() const { return mode == LossMode::full ? total_full : total_basic; }
};

/// total_basic = weighted trans + cycle + realness terms;
/// total_full = total_basic + weighted xi_r + theta_s.
/// In basic mode the self-supervision fields are zeroed.
LossReport aggregate(const LossTerms& terms, const LossWeights& weights, LossMode mode);

/// Element-wise mean of reports (weights and mode taken from the first).
LossReport mean_report(const std::vector<LossReport>& reports);

nlohmann::json to_json(const LossReport& report);

}  // namespace weakpair
