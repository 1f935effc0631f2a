#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "weakpair/dataset.hpp"
#include "weakpair/estimator.hpp"
#include "weakpair/losses.hpp"
#include "weakpair/randomization.hpp"

namespace weakpair {

/// Parametric style translator: K x K convolution, then gain and bias.
struct TranslatorParams {
  Image kernel;
  double gain = 1.0;
  double bias = 0.0;

  static TranslatorParams identity(int kernel_size = 5);
  int kernel_size() const { return kernel.width(); }

  /// Kernel (row-major), gain, bias.
  std::vector<double> flatten() const;
  static TranslatorParams unflatten(std::span<const double> values, int kernel_size);
};

/// Zero-padded convolution followed by gain * x + bias. Not clamped.
Image translate(const Image& img, const TranslatorParams& params);

nlohmann::json to_json(const TranslatorParams& params);
TranslatorParams translator_from_json(const nlohmann::json& j);

struct Ablations {
  bool no_pr = false;
  bool no_cycle = false;
  bool no_xi_r = false;
  bool no_theta_s = false;
};

/// Parses a comma list drawn from {pr, cycle, xi_r, theta_s}.
Ablations parse_ablations(std::string_view list);

enum class LrSchedule { constant, cosine };

struct TrainConfig {
  LossMode mode = LossMode::full;
  Ablations ablate;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  // cosine: learning_rate * (1 + cos(pi * step / steps)) / 2
  LrSchedule schedule = LrSchedule::cosine;
  int steps = 200;
  int batch_size = 4;
  LossWeights weights;
  std::uint64_t seed = 0;
  EstimatorOptions estimator;
  PoseRange injection_range;
  double fd_step = 1e-4;
  // Per-coordinate gradient clamp; 0 disables. The estimator makes discrete
  // choices, so a difference quotient straddling one can be enormous.
  double grad_clip = 2.0;
  int kernel_size = 5;
  double peak_sigma = kDefaultPeakSigma;

  void validate() const;
};

struct TrainingPair {
  Image original;
  Image target;
};

/// Poses injected for one pair evaluation: one for pose randomization
/// (original only) and one for self-supervision (both images).
struct Injections {
  Sim2Pose randomization;
  Sim2Pose self_supervision;
};

Injections draw_injections(const PoseRange& range, std::uint64_t seed);

/// Every loss term for one pair at the given translator parameters.
LossReport forward_losses(const TrainingPair& pair, const TranslatorParams& params_t,
                          const TranslatorParams& params_o, const Injections& inj,
                          const TrainConfig& config, const RealnessScorer& scorer = constant_scorer());

using Objective = std::function<double(std::span<const double>)>;

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h. Throws
/// ValidationError for h <= 0 and std::domain_error on a non-finite value.
std::vector<double> grad_fd(const Objective& objective, std::span<const double> params, double h);

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HistoryRow {
  int step = 0;
  LossReport report;  // batch mean at the parameters entering this step
};

struct TrainResult {
  TranslatorParams params_t;
  TranslatorParams params_o;
  std::vector<HistoryRow> history;
};

/// Momentum gradient descent on the configured objective. Deterministic per
/// config.seed. Aborts with TrainingDiverged if the loss exceeds 1e6.
TrainResult train(const std::vector<TrainingPair>& corpus, const TrainConfig& config,
                  const RealnessScorer& scorer = constant_scorer());

std::vector<TrainingPair> load_training_pairs(const Manifest& manifest);

std::string history_csv(const std::vector<HistoryRow>& history);
nlohmann::json params_json(const TrainResult& result, const TrainConfig& config);

struct PairMetrics {
  std::string id;
  double l1 = 0.0;     // estimated-pose aligned
  double l1_gt = 0.0;  // ground-truth aligned
  double theta_err_deg = 0.0;
  double scale_err_pct = 0.0;
  double trans_err_px = 0.0;
  bool success = false;
};

struct MetricSummary {
  double l1 = 0.0;
  double l1_gt = 0.0;
  double theta_err_deg = 0.0;
  double scale_err_pct = 0.0;
  double trans_err_px = 0.0;
};

struct EvalMetrics {
  std::vector<PairMetrics> pairs;
  MetricSummary mean;
  MetricSummary median;
  double success_rate = 0.0;
};

/// Translates each original, registers it to its target and scores the
/// result against the ground-truth pose. Needs an eval manifest.
EvalMetrics evaluate(const TranslatorParams& params_t, const Manifest& eval_manifest,
                     const EstimatorOptions& opts = {});

std::string metrics_csv(const EvalMetrics& metrics);

/// Masked L1 between warp(translate(original), xi) and target over the
/// region valid under xi.
double ground_truth_l1(const TranslatorParams& params_t, const Image& original, const Image& target,
                       const Sim2Pose& xi);

}  // namespace weakpair
