#include "weakpair/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "weakpair/error.hpp"
#include "weakpair/image_io.hpp"

namespace weakpair {

TranslatorParams TranslatorParams::identity(int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ValidationError("kernel size must be odd");
  TranslatorParams p;
  p.kernel = Image(kernel_size, kernel_size, 0.0);
  p.kernel.at(kernel_size / 2, kernel_size / 2) = 1.0;
  return p;
}

std::vector<double> TranslatorParams::flatten() const {
  std::vector<double> v(kernel.pixels().begin(), kernel.pixels().end());
  v.push_back(gain);
  v.push_back(bias);
  return v;
}

TranslatorParams TranslatorParams::unflatten(std::span<const double> values, int kernel_size) {
  const std::size_t n = static_cast<std::size_t>(kernel_size) * kernel_size;
  if (values.size() != n + 2) throw ValidationError("translator parameter vector has wrong length");
  TranslatorParams p = identity(kernel_size);
  std::copy_n(values.begin(), n, p.kernel.pixels().begin());
  p.gain = values[n];
  p.bias = values[n + 1];
  return p;
}

Image translate(const Image& img, const TranslatorParams& params) {
  const Image& k = params.kernel;
  const int r = k.width() / 2;
  const int w = img.width();
  const int h = img.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) {
        const int sy = y - j;
        if (sy < 0 || sy >= h) continue;
        for (int i = -r; i <= r; ++i) {
          const int sx = x - i;
          if (sx < 0 || sx >= w) continue;
          acc += k.at(i + r, j + r) * img.at(sx, sy);
        }
      }
      out.at(x, y) = params.gain * acc + params.bias;
    }
  }
  return out;
}

nlohmann::json to_json(const TranslatorParams& p) {
  nlohmann::json kernel = nlohmann::json::array();
  for (int y = 0; y < p.kernel.height(); ++y) {
    nlohmann::json row = nlohmann::json::array();
    for (int x = 0; x < p.kernel.width(); ++x) row.push_back(p.kernel.at(x, y));
    kernel.push_back(row);
  }
  return {{"kernel", kernel}, {"gain", p.gain}, {"bias", p.bias}};
}

TranslatorParams translator_from_json(const nlohmann::json& j) {
  const auto& k = j.at("kernel");
  const int n = static_cast<int>(k.size());
  TranslatorParams p = TranslatorParams::identity(n);
  for (int y = 0; y < n; ++y) {
    if (static_cast<int>(k[y].size()) != n) throw ValidationError("translator kernel must be square");
    for (int x = 0; x < n; ++x) p.kernel.at(x, y) = k[y][x].get<double>();
  }
  p.gain = j.at("gain").get<double>();
  p.bias = j.at("bias").get<double>();
  return p;
}

Ablations parse_ablations(std::string_view list) {
  Ablations a;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    if (item == "pr") a.no_pr = true;
    else if (item == "cycle") a.no_cycle = true;
    else if (item == "xi_r") a.no_xi_r = true;
    else if (item == "theta_s") a.no_theta_s = true;
    else if (!item.empty()) throw ValidationError("unknown ablation '" + std::string(item) + "'");
    start = end + 1;
  }
  return a;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must lie in [0, 1)");
  if (steps < 1) throw ValidationError("steps must be >= 1");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (!(fd_step > 0.0)) throw ValidationError("finite-difference step must be > 0");
  if (!(grad_clip >= 0.0)) throw ValidationError("gradient clip must be >= 0");
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ValidationError("kernel size must be odd");
  weights.validate();
  injection_range.validate();
}

Injections draw_injections(const PoseRange& range, std::uint64_t seed) {
  return {sample_pose(range, derive_seed(seed, 0)), sample_pose(range, derive_seed(seed, 1))};
}

namespace {

Mask full_mask(const Image& img) { return Mask(img.width(), img.height(), true); }

// Falls back to the whole frame when an estimate leaves nothing valid.
Mask usable(const Mask& m, const Image& img, bool& degraded) {
  if (m.count() > 0) return m;
  degraded = true;
  return full_mask(img);
}

}  // namespace

LossReport forward_losses(const TrainingPair& pair, const TranslatorParams& params_t,
                          const TranslatorParams& params_o, const Injections& inj,
                          const TrainConfig& config, const RealnessScorer& scorer) {
  const Image& original = pair.original;
  const Image& target = pair.target;
  if (!original.same_shape(target)) throw ValidationError("forward_losses: dimension mismatch");
  const int w = target.width();
  const int h = target.height();
  const int margin = params_t.kernel_size() / 2 + 1;
  bool degraded = false;

  LossTerms terms;
  const Image fake = translate(original, params_t);
  Image recovered = fake;
  Image recovered_rand = fake;

  if (config.ablate.no_pr) {
    const double l = l1_masked(target, fake, full_mask(target));
    terms.l_trans = 2.0 * l;
  } else {
    const Image fake_rand = translate(warp(original, inj.randomization), params_t);
    const PoseEstimate est = estimate_sim2(fake, target, config.estimator);
    const PoseEstimate est_rand = estimate_sim2(fake_rand, target, config.estimator);
    recovered = apply_estimate(fake, est);
    recovered_rand = apply_estimate(fake_rand, est_rand);
    degraded = est.low_confidence || est_rand.low_confidence;

    const Mask target_valid = valid_mask(w, h, est.pose).eroded(margin);
    const Mask rand_valid =
        overlap_mask(w, h, est_rand.pose, compose(est_rand.pose, inj.randomization)).eroded(margin) &
        target_valid;
    terms.l_trans = l1_masked(target, recovered, usable(target_valid, target, degraded)) +
                    l1_masked(target, recovered_rand, usable(rand_valid, target, degraded));
  }

  if (!config.ablate.no_cycle)
    terms.l_cycle = l1_masked(original, translate(fake, params_o), full_mask(original));

  terms.l_realness_g = realness_bce(scorer(fake), true) + realness_bce(scorer(recovered), true);
  terms.l_realness_d = realness_bce(scorer(fake), false) + realness_bce(scorer(recovered), false) +
                       realness_bce(scorer(recovered_rand), false) + realness_bce(scorer(target), true);

  if (config.mode == LossMode::full && !(config.ablate.no_xi_r && config.ablate.no_theta_s)) {
    const InjectedBoth ss{warp(original, inj.self_supervision), warp(target, inj.self_supervision),
                          inj.self_supervision};
    const Image fake_ss = translate(ss.original, params_t);
    if (!config.ablate.no_xi_r)
      terms.l_xi_r = loss_xi_r(fake, fake_ss, ss.xi_r, config.estimator, config.peak_sigma);
    if (!config.ablate.no_theta_s)
      terms.l_theta_s = loss_theta_s(fake, target, fake_ss, ss.target, config.estimator);
  }

  LossReport report = aggregate(terms, config.weights, config.mode);
  report.low_confidence = degraded;
  return report;
}

std::vector<double> grad_fd(const Objective& objective, std::span<const double> params, double h) {
  if (!(h > 0.0)) throw ValidationError("grad_fd: step must be > 0");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = objective(p);
    p[i] = saved - h;
    const double down = objective(p);
    p[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) throw std::domain_error("grad_fd: non-finite objective");
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

constexpr double kDivergenceLimit = 1e6;

struct BatchItem {
  std::size_t index;
  Injections inj;
};

// Epoch-wise shuffled order; batch b takes the next batch_size entries.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) {}

  std::vector<BatchItem> next(int batch_size, const PoseRange& range) {
    std::vector<BatchItem> batch;
    for (int j = 0; j < batch_size; ++j) {
      if (cursor_ == order_.size()) reshuffle();
      const std::uint64_t draw = derive_seed(seed_ ^ 0x1f3du, drawn_++);
      batch.push_back({order_[cursor_++], draw_injections(range, draw)});
    }
    return batch;
  }

 private:
  void reshuffle() {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(seed_, epoch_++));
    // Fisher-Yates with an explicit index draw; std::shuffle's use of the
    // engine is unspecified across standard libraries.
    for (std::size_t i = n_; i > 1; --i) std::swap(order_[i - 1], order_[rng() % i]);
    cursor_ = 0;
  }

  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::uint64_t drawn_ = 0;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

LossReport batch_report(const std::vector<TrainingPair>& corpus, const std::vector<BatchItem>& batch,
                        const TranslatorParams& pt, const TranslatorParams& po, const TrainConfig& config,
                        const RealnessScorer& scorer) {
  std::vector<LossReport> reports;
  reports.reserve(batch.size());
  for (const auto& item : batch)
    reports.push_back(forward_losses(corpus[item.index], pt, po, item.inj, config, scorer));
  return mean_report(reports);
}

// Only the cycle term depends on the inverse translator.
double batch_cycle(const std::vector<TrainingPair>& corpus, const std::vector<BatchItem>& batch,
                   const std::vector<Image>& fakes, const TranslatorParams& po, double weight) {
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Image& original = corpus[batch[i].index].original;
    sum += l1_masked(original, translate(fakes[i], po), Mask(original.width(), original.height(), true));
  }
  return weight * sum / static_cast<double>(batch.size());
}

double step_rate(const TrainConfig& config, int step) {
  if (config.schedule == LrSchedule::constant) return config.learning_rate;
  return config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * step / config.steps));
}

void momentum_step(std::vector<double>& params, std::vector<double>& velocity, const std::vector<double>& grad,
                   const TrainConfig& config, double rate) {
  const double clip = config.grad_clip > 0.0 ? config.grad_clip : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = config.momentum * velocity[i] - rate * std::clamp(grad[i], -clip, clip);
    params[i] += velocity[i];
  }
}

}  // namespace

TrainResult train(const std::vector<TrainingPair>& corpus, const TrainConfig& config,
                  const RealnessScorer& scorer) {
  config.validate();
  if (corpus.empty()) throw ValidationError("train: empty corpus");
  const int k = config.kernel_size;

  std::vector<double> flat_t = TranslatorParams::identity(k).flatten();
  std::vector<double> flat_o = flat_t;
  std::vector<double> vel_t(flat_t.size(), 0.0);
  std::vector<double> vel_o(flat_o.size(), 0.0);
  BatchSampler sampler(corpus.size(), config.seed);

  TrainResult result;
  for (int step = 0; step < config.steps; ++step) {
    const auto batch = sampler.next(config.batch_size, config.injection_range);
    const TranslatorParams pt = TranslatorParams::unflatten(flat_t, k);
    const TranslatorParams po = TranslatorParams::unflatten(flat_o, k);

    const LossReport report = batch_report(corpus, batch, pt, po, config, scorer);
    if (!std::isfinite(report.objective()) || report.objective() > kDivergenceLimit) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "training diverged at step %d (loss %.6g)", step, report.objective());
      throw TrainingDiverged(msg);
    }
    result.history.push_back({step, report});
    if (config.learning_rate == 0.0) continue;

    const Objective objective_t = [&](std::span<const double> p) {
      return batch_report(corpus, batch, TranslatorParams::unflatten(p, k), po, config, scorer).objective();
    };
    const std::vector<double> grad_t = grad_fd(objective_t, flat_t, config.fd_step);

    std::vector<double> grad_o(flat_o.size(), 0.0);
    if (!config.ablate.no_cycle) {
      std::vector<Image> fakes;
      for (const auto& item : batch) fakes.push_back(translate(corpus[item.index].original, pt));
      const Objective objective_o = [&](std::span<const double> p) {
        return batch_cycle(corpus, batch, fakes, TranslatorParams::unflatten(p, k), config.weights.cycle);
      };
      grad_o = grad_fd(objective_o, flat_o, config.fd_step);
    }

    const double rate = step_rate(config, step);
    momentum_step(flat_t, vel_t, grad_t, config, rate);
    momentum_step(flat_o, vel_o, grad_o, config, rate);
  }
  result.params_t = TranslatorParams::unflatten(flat_t, k);
  result.params_o = TranslatorParams::unflatten(flat_o, k);
  return result;
}

std::vector<TrainingPair> load_training_pairs(const Manifest& manifest) {
  std::vector<TrainingPair> pairs;
  for (const auto& rec : manifest.pairs) {
    TrainingPair p{read_pgm(manifest.base_dir / rec.original), read_pgm(manifest.base_dir / rec.target)};
    if (!p.original.same_shape(p.target)) throw ValidationError("pair " + rec.id + ": image size mismatch");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::ostringstream out;
  out << "step,l_trans,l_cycle,l_realness_g,l_realness_d,l_xi_r,l_theta_s,total_basic,total_full,total\n";
  for (const auto& row : history) {
    const LossReport& r = row.report;
    out << row.step << ',' << num(r.l_trans) << ',' << num(r.l_cycle) << ',' << num(r.l_realness_g) << ','
        << num(r.l_realness_d) << ',' << num(r.l_xi_r) << ',' << num(r.l_theta_s) << ','
        << num(r.total_basic) << ',' << num(r.total_full) << ',' << num(r.objective()) << '\n';
  }
  return out.str();
}

nlohmann::json params_json(const TrainResult& result, const TrainConfig& config) {
  return {{"params_t", to_json(result.params_t)},
          {"params_o", to_json(result.params_o)},
          {"seed", config.seed},
          {"steps", config.steps},
          {"mode", config.mode == LossMode::full ? "full" : "basic"}};
}

double ground_truth_l1(const TranslatorParams& params_t, const Image& original, const Image& target,
                       const Sim2Pose& xi) {
  const Image aligned = warp(translate(original, params_t), xi);
  const int margin = params_t.kernel_size() / 2 + 1;
  Mask mask = valid_mask(target.width(), target.height(), xi).eroded(margin);
  if (mask.count() == 0) mask = Mask(target.width(), target.height(), true);
  return l1_masked(aligned, target, mask);
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EvalMetrics evaluate(const TranslatorParams& params_t, const Manifest& eval_manifest,
                     const EstimatorOptions& opts) {
  if (eval_manifest.pairs.empty()) throw ValidationError("evaluate: empty eval set");
  if (eval_manifest.xi.size() != eval_manifest.pairs.size())
    throw ValidationError("evaluate: manifest carries no ground-truth poses");
  const std::vector<TrainingPair> pairs = load_training_pairs(eval_manifest);

  EvalMetrics m;
  const int margin = params_t.kernel_size() / 2 + 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Image fake = translate(pairs[i].original, params_t);
    const Image& target = pairs[i].target;
    const Sim2Pose& xi = eval_manifest.xi[i];
    const PoseEstimate est = estimate_sim2(fake, target, opts);

    PairMetrics pm;
    pm.id = eval_manifest.pairs[i].id;
    Mask mask = valid_mask(target.width(), target.height(), est.pose).eroded(margin);
    if (mask.count() == 0) mask = Mask(target.width(), target.height(), true);
    pm.l1 = l1_masked(apply_estimate(fake, est), target, mask);
    pm.l1_gt = ground_truth_l1(params_t, pairs[i].original, target, xi);
    pm.theta_err_deg = angle_distance(est.pose.theta, xi.theta, 2.0 * std::numbers::pi) * 180.0 / std::numbers::pi;
    pm.scale_err_pct = 100.0 * std::abs(est.pose.scale / xi.scale - 1.0);
    pm.trans_err_px = std::hypot(est.pose.tx - xi.tx, est.pose.ty - xi.ty);
    pm.success = pm.theta_err_deg <= 2.0 && pm.scale_err_pct <= 2.0 && pm.trans_err_px <= 2.0;
    m.pairs.push_back(pm);
  }

  auto column = [&](auto field) {
    std::vector<double> v;
    for (const auto& p : m.pairs) v.push_back(p.*field);
    return v;
  };
  auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const auto l1 = column(&PairMetrics::l1);
  const auto l1_gt = column(&PairMetrics::l1_gt);
  const auto th = column(&PairMetrics::theta_err_deg);
  const auto sc = column(&PairMetrics::scale_err_pct);
  const auto tr = column(&PairMetrics::trans_err_px);
  m.mean = {mean_of(l1), mean_of(l1_gt), mean_of(th), mean_of(sc), mean_of(tr)};
  m.median = {median_of(l1), median_of(l1_gt), median_of(th), median_of(sc), median_of(tr)};
  m.success_rate = static_cast<double>(std::count_if(m.pairs.begin(), m.pairs.end(),
                                                     [](const PairMetrics& p) { return p.success; })) /
                   static_cast<double>(m.pairs.size());
  return m;
}

std::string metrics_csv(const EvalMetrics& m) {
  std::ostringstream out;
  out << "id,l1,l1_gt,theta_err_deg,scale_err_pct,trans_err_px,success\n";
  for (const auto& p : m.pairs)
    out << p.id << ',' << num(p.l1) << ',' << num(p.l1_gt) << ',' << num(p.theta_err_deg) << ','
        << num(p.scale_err_pct) << ',' << num(p.trans_err_px) << ',' << (p.success ? 1 : 0) << '\n';
  auto summary = [&](const char* name, const MetricSummary& s) {
    out << name << ',' << num(s.l1) << ',' << num(s.l1_gt) << ',' << num(s.theta_err_deg) << ','
        << num(s.scale_err_pct) << ',' << num(s.trans_err_px) << ',' << num(m.success_rate) << '\n';
  };
  summary("mean", m.mean);
  summary("median", m.median);
  return out.str();
}

}  // namespace weakpair
