#include "weakpair/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "weakpair/dataset.hpp"
#include "weakpair/error.hpp"
#include "weakpair/estimator.hpp"
#include "weakpair/image_io.hpp"
#include "weakpair/scene.hpp"
#include "weakpair/selftest.hpp"
#include "weakpair/trainer.hpp"

namespace weakpair {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDeg = 180.0 / std::numbers::pi;

struct EstimatorFlags {
  EstimatorOptions opts;
  std::string mode = "soft";
  bool no_window = false;
  bool no_highpass = false;

  void attach(CLI::App* app) {
    app->add_option("--beta", opts.beta, "softmax temperature of the soft readout")
        ->envname("WEAKPAIR_BETA")
        ->capture_default_str();
    app->add_option("--mode", mode, "pose readout")
        ->check(CLI::IsMember({"soft", "hard"}))
        ->envname("WEAKPAIR_MODE")
        ->capture_default_str();
    app->add_option("--n-theta", opts.n_theta, "log-polar angle bins (0: image side)")->envname("WEAKPAIR_N_THETA");
    app->add_option("--n-rho", opts.n_rho, "log-polar radius bins (0: image side)")->envname("WEAKPAIR_N_RHO");
    app->add_flag("--no-window", no_window, "skip the Hann window")->envname("WEAKPAIR_NO_WINDOW");
    app->add_flag("--no-highpass", no_highpass, "skip the spectrum highpass")->envname("WEAKPAIR_NO_HIGHPASS");
  }

  EstimatorOptions resolve() const {
    EstimatorOptions o = opts;
    o.mode = mode == "hard" ? Readout::hard : Readout::soft;
    o.window = !no_window;
    o.highpass = !no_highpass;
    if (!(o.beta > 0.0)) throw ValidationError("--beta must be > 0");
    return o;
  }
};

// Angles are given in degrees on the command line.
struct RangeFlags {
  double scale_min = 0.8;
  double scale_max = 1.2;
  double theta_min = 0.0;
  double theta_max = 180.0;
  double t_max = 50.0;
  bool log_scale = false;

  void attach(CLI::App* app) {
    app->add_option("--scale-min", scale_min)->envname("WEAKPAIR_SCALE_MIN")->capture_default_str();
    app->add_option("--scale-max", scale_max)->envname("WEAKPAIR_SCALE_MAX")->capture_default_str();
    app->add_option("--theta-min", theta_min, "degrees")->envname("WEAKPAIR_THETA_MIN")->capture_default_str();
    app->add_option("--theta-max", theta_max, "degrees")->envname("WEAKPAIR_THETA_MAX")->capture_default_str();
    app->add_option("--t-max", t_max, "pixels")->envname("WEAKPAIR_T_MAX")->capture_default_str();
    app->add_flag("--log-scale", log_scale, "draw scale log-uniformly")->envname("WEAKPAIR_LOG_SCALE");
  }

  PoseRange resolve() const {
    PoseRange r{scale_min, scale_max, theta_min / kDeg, theta_max / kDeg, t_max, log_scale};
    r.validate();
    return r;
  }
};

json confidence_json(const PoseEstimate& est) {
  return {{"rot_scale_peak", est.rot_scale_peak},
          {"trans_peak", est.trans_peak},
          {"low_confidence", est.low_confidence}};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_register(const std::string& moving_path, const std::string& fixed_path, const std::string& apply_path,
                 const EstimatorFlags& flags, std::ostream& out) {
  const EstimatorOptions opts = flags.resolve();
  const Image moving = read_image(moving_path);
  const Image fixed = read_image(fixed_path);
  if (!moving.same_shape(fixed))
    throw IoError("image sizes differ: " + std::to_string(moving.width()) + "x" + std::to_string(moving.height()) +
                  " vs " + std::to_string(fixed.width()) + "x" + std::to_string(fixed.height()));
  const PoseEstimate est = estimate_sim2(moving, fixed, opts);
  if (!apply_path.empty()) write_pgm(apply_path, apply_estimate(moving, est));
  const json j{{"s", est.pose.scale},
               {"theta_deg", est.pose.theta * kDeg},
               {"tx", est.pose.tx},
               {"ty", est.pose.ty},
               {"confidence", confidence_json(est)}};
  out << j.dump() << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::string sources;
  int scenes = 8;
  int size = 64;
  std::string out_dir;
  int n = 50;
  std::uint64_t seed = 0;
  std::string style = "disrupted";
  double gain = 0.9;
  double bias = 0.05;
  double blur = 1.0;
  RangeFlags range;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.n < 0) throw ValidationError("--n must be >= 0");
  const PoseRange range = a.range.resolve();
  StyleSpec spec;
  if (a.style == "identity") spec = StyleSpec::identity();
  else if (a.style == "pointwise") spec = StyleSpec::pointwise(a.gain, a.bias);
  else spec = StyleSpec::disrupted(derive_seed(a.seed, 0x5717e), a.blur, a.gain, a.bias);

  std::vector<Image> sources;
  if (!a.sources.empty()) {
    sources = load_sources(a.sources);
  } else {
    if (a.scenes < 1 || a.size < 8) throw ValidationError("--scenes must be >= 1 and --size >= 8");
    for (int i = 0; i < a.scenes; ++i)
      sources.push_back(render_scene(a.size, a.size, derive_seed(a.seed, 0x5ce0e + i)));
  }
  const CorpusPaths paths = generate_corpus(sources, a.out_dir, spec, range, a.n, a.seed);
  out << json{{"manifest", paths.manifest.string()},
              {"eval_manifest", paths.eval_manifest.string()},
              {"pairs", a.n},
              {"seed", a.seed}}
             .dump()
      << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string manifest;
  std::string out_dir;
  std::string loss = "full";
  std::string schedule = "cosine";
  std::string ablate;
  TrainConfig config;
  EstimatorFlags estimator;
  bool use_manifest_range = true;
  RangeFlags range;
};

int cmd_train(TrainArgs a, std::ostream& out) {
  TrainConfig config = a.config;
  config.mode = a.loss == "basic" ? LossMode::basic : LossMode::full;
  config.schedule = a.schedule == "constant" ? LrSchedule::constant : LrSchedule::cosine;
  config.ablate = parse_ablations(a.ablate);
  config.estimator = a.estimator.resolve();
  const Manifest manifest = read_manifest(a.manifest);
  config.injection_range = a.use_manifest_range ? manifest.pose_range : a.range.resolve();
  config.validate();

  const TrainResult result = train(load_training_pairs(manifest), config);
  fs::create_directories(a.out_dir);
  const fs::path params_path = fs::path(a.out_dir) / "params.json";
  const fs::path history_path = fs::path(a.out_dir) / "history.csv";
  write_text(params_path, dump_json(params_json(result, config)));
  write_text(history_path, history_csv(result.history));

  const LossReport& first = result.history.front().report;
  const LossReport& last = result.history.back().report;
  out << json{{"params", params_path.string()},
              {"history", history_path.string()},
              {"seed", config.seed},
              {"steps", config.steps},
              {"initial_l_trans", first.l_trans},
              {"final_l_trans", last.l_trans},
              {"initial_objective", first.objective()},
              {"final_objective", last.objective()}}
             .dump()
      << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string params;
  std::string manifest;
  std::string out_path;
  std::string format = "csv";
  EstimatorFlags estimator;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const EstimatorOptions opts = a.estimator.resolve();
  json params_doc;
  try {
    params_doc = json::parse(read_text(a.params));
  } catch (const json::parse_error& e) {
    throw IoError("malformed params file " + a.params + ": " + e.what());
  }
  const TranslatorParams params = translator_from_json(params_doc.at("params_t"));
  const EvalMetrics metrics = evaluate(params, read_manifest(a.manifest), opts);
  const std::string csv = metrics_csv(metrics);
  if (!a.out_path.empty()) write_text(a.out_path, csv);
  if (a.format == "json") {
    auto summary = [](const MetricSummary& s) {
      return json{{"l1", s.l1},
                  {"l1_gt", s.l1_gt},
                  {"theta_err_deg", s.theta_err_deg},
                  {"scale_err_pct", s.scale_err_pct},
                  {"trans_err_px", s.trans_err_px}};
    };
    out << json{{"pairs", metrics.pairs.size()},
                {"mean", summary(metrics.mean)},
                {"median", summary(metrics.median)},
                {"success_rate", metrics.success_rate}}
               .dump()
        << '\n';
  } else {
    out << csv;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weakly-paired image registration and pose-randomized style training"};
  app.name("weakpair");
  app.require_subcommand(1);

  std::uint64_t seed = 0;

  auto* reg = app.add_subcommand("register", "estimate the similarity pose taking MOVING onto FIXED");
  std::string moving, fixed, apply_path;
  EstimatorFlags reg_flags;
  reg->add_option("moving", moving)->required();
  reg->add_option("fixed", fixed)->required();
  reg->add_option("--apply", apply_path, "write MOVING warped by the estimate (PGM)");
  reg_flags.attach(reg);

  auto* synth = app.add_subcommand("synth", "generate a synthetic weakly-paired corpus");
  SynthArgs sa;
  synth->add_option("--out", sa.out_dir, "output directory")->required();
  synth->add_option("--sources", sa.sources, "directory of PGM/PNG sources (default: procedural scenes)");
  synth->add_option("--scenes", sa.scenes, "procedural scene count")->capture_default_str();
  synth->add_option("--size", sa.size, "procedural scene side length")->capture_default_str();
  synth->add_option("--n", sa.n, "pairs to generate")->capture_default_str();
  synth->add_option("--style", sa.style)
      ->check(CLI::IsMember({"identity", "pointwise", "disrupted"}))
      ->envname("WEAKPAIR_STYLE")
      ->capture_default_str();
  synth->add_option("--gain", sa.gain)->envname("WEAKPAIR_GAIN")->capture_default_str();
  synth->add_option("--bias", sa.bias)->envname("WEAKPAIR_BIAS")->capture_default_str();
  synth->add_option("--blur", sa.blur, "Gaussian sigma")->envname("WEAKPAIR_BLUR")->capture_default_str();
  synth->add_option("--seed", sa.seed)->envname("WEAKPAIR_SEED")->capture_default_str();
  sa.range.attach(synth);

  auto* tr = app.add_subcommand("train", "fit the style translator on a corpus manifest");
  TrainArgs ta;
  tr->add_option("--manifest", ta.manifest)->required();
  tr->add_option("--out", ta.out_dir, "directory for params.json and history.csv")->required();
  tr->add_option("--loss", ta.loss)->check(CLI::IsMember({"basic", "full"}))->capture_default_str();
  tr->add_option("--ablate", ta.ablate, "comma list of pr,cycle,xi_r,theta_s")->envname("WEAKPAIR_ABLATE");
  tr->add_option("--steps", ta.config.steps)->envname("WEAKPAIR_STEPS")->capture_default_str();
  tr->add_option("--lr", ta.config.learning_rate)->envname("WEAKPAIR_LR")->capture_default_str();
  tr->add_option("--momentum", ta.config.momentum)->capture_default_str();
  tr->add_option("--lr-schedule", ta.schedule, "cosine decays the rate to 0 over the run")
      ->check(CLI::IsMember({"constant", "cosine"}))
      ->capture_default_str();
  tr->add_option("--batch", ta.config.batch_size)->capture_default_str();
  tr->add_option("--kernel", ta.config.kernel_size, "translator kernel size (odd)")->capture_default_str();
  tr->add_option("--fd-step", ta.config.fd_step)->capture_default_str();
  tr->add_option("--grad-clip", ta.config.grad_clip, "per-coordinate gradient clamp (0: off)")->capture_default_str();
  tr->add_option("--peak-sigma", ta.config.peak_sigma, "one-peak target sigma (bins)")->capture_default_str();
  tr->add_option("--w-trans", ta.config.weights.trans)->capture_default_str();
  tr->add_option("--w-cycle", ta.config.weights.cycle)->capture_default_str();
  tr->add_option("--w-realness-g", ta.config.weights.realness_g)->capture_default_str();
  tr->add_option("--w-realness-d", ta.config.weights.realness_d)->capture_default_str();
  tr->add_option("--w-xi-r", ta.config.weights.xi_r)->capture_default_str();
  tr->add_option("--w-theta-s", ta.config.weights.theta_s)->capture_default_str();
  tr->add_option("--seed", ta.config.seed)->envname("WEAKPAIR_SEED")->capture_default_str();
  auto* range_opt = tr->add_flag("--injection-range", "use the range flags below instead of the manifest's range");
  ta.range.attach(tr);
  ta.estimator.attach(tr);

  auto* ev = app.add_subcommand("eval", "score a trained translator against an eval manifest");
  EvalArgs ea;
  ev->add_option("--params", ea.params)->required();
  ev->add_option("--manifest", ea.manifest, "eval manifest (with ground-truth poses)")->required();
  ev->add_option("--out", ea.out_path, "write the metrics CSV here");
  ev->add_option("--format", ea.format, "stdout format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  ea.estimator.attach(ev);

  auto* st = app.add_subcommand("selftest", "run the built-in invariant checks");
  (void)seed;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (reg->parsed()) return cmd_register(moving, fixed, apply_path, reg_flags, out);
    if (synth->parsed()) return cmd_synth(sa, out);
    if (tr->parsed()) {
      ta.use_manifest_range = range_opt->count() == 0;
      return cmd_train(ta, out);
    }
    if (ev->parsed()) return cmd_eval(ea, out);
    if (st->parsed()) return run_selftest(out) == 0 ? kExitOk : kExitSelftest;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    // ValidationError, TrainingDiverged and estimator domain errors.
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace weakpair
