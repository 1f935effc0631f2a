#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "weakpair/image_io.hpp"
#include "weakpair/scene.hpp"
#include "weakpair/trainer.hpp"

using namespace weakpair;
namespace fs = std::filesystem;

namespace {

PoseRange mild_range() {
  PoseRange r;
  r.scale_min = 0.95;
  r.scale_max = 1.05;
  r.t_max = 5;
  return r;
}

TrainingPair styled_pair(int size, std::uint64_t seed, const StyleSpec& style, const PoseRange& range) {
  const WeakPair p = make_pair(render_scene(size, size, seed), style, range, derive_seed(seed, 1));
  return {p.original, p.target};
}

TranslatorParams pointwise_params(int k, double gain, double bias) {
  TranslatorParams p = TranslatorParams::identity(k);
  p.gain = gain;
  p.bias = bias;
  return p;
}

TrainConfig small_config() {
  TrainConfig c;
  c.kernel_size = 3;
  c.batch_size = 2;
  c.steps = 4;
  c.injection_range = mild_range();
  c.estimator.beta = 100;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("translator forward pass") {
    const Image img = oracle::noise(12, 10, 1);
    CHECK(translate(img, TranslatorParams::identity()) == img);

    TranslatorParams p = TranslatorParams::identity(3);
    for (double& v : p.kernel.pixels()) v = 0.05;
    p.gain = 1.7;
    p.bias = -0.2;
    const Image out = translate(Image(9, 9, 0.4), p);
    CHECK(out.at(4, 4) == doctest::Approx(1.7 * 0.4 * 0.45 - 0.2));
    // zero padding at the border: only 4 of 9 taps land on the image
    CHECK(out.at(0, 0) == doctest::Approx(1.7 * 0.4 * 0.2 - 0.2));

    TranslatorParams q = p;
    q.gain = 3.4;
    q.bias = 0.0;
    p.bias = 0.0;
    const Image a = translate(img, p), b = translate(img, q);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.pixels()[i] == doctest::Approx(2 * a.pixels()[i]));
  }

  TEST_CASE("translator kernel orientation matches a true convolution") {
    TranslatorParams p = TranslatorParams::identity(3);
    p.kernel = Image(3, 3, 0.0);
    p.kernel.at(2, 1) = 1.0;  // tap at offset (+1, 0)
    Image delta(7, 7, 0.0);
    delta.at(3, 3) = 1.0;
    CHECK(translate(delta, p).at(4, 3) == 1.0);
  }

  TEST_CASE("parameter vector round trip and JSON") {
    TranslatorParams p = pointwise_params(5, 0.7, 0.1);
    p.kernel.at(1, 3) = 0.25;
    const auto flat = p.flatten();
    CHECK(flat.size() == 27u);
    const TranslatorParams back = TranslatorParams::unflatten(flat, 5);
    CHECK(back.kernel == p.kernel);
    CHECK(back.gain == 0.7);
    CHECK(back.bias == 0.1);
    CHECK_THROWS_AS(TranslatorParams::unflatten(flat, 3), std::invalid_argument);
    CHECK_THROWS_AS(TranslatorParams::identity(4), std::invalid_argument);
    const TranslatorParams j = translator_from_json(to_json(p));
    CHECK(j.kernel == p.kernel);
    CHECK(j.gain == p.gain);
  }

  TEST_CASE("ablation parsing") {
    const Ablations a = parse_ablations("pr,theta_s");
    CHECK(a.no_pr);
    CHECK(a.no_theta_s);
    CHECK_FALSE(a.no_cycle);
    CHECK_FALSE(a.no_xi_r);
    const Ablations none = parse_ablations("");
    CHECK_FALSE(none.no_pr);
    CHECK_THROWS_AS(parse_ablations("pr,bogus"), std::invalid_argument);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.steps = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.kernel_size = 4;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = TrainConfig{};
    c.momentum = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("identity everything gives zero translation loss") {
    const Image img = render_scene(64, 64, 2);
    TrainConfig c;
    c.injection_range = PoseRange::identity();
    const Injections inj = draw_injections(c.injection_range, 1);
    const LossReport r = forward_losses({img, img}, TranslatorParams::identity(), TranslatorParams::identity(), inj, c);
    CHECK(r.l_trans <= 1e-6);
    CHECK(r.l_cycle <= 1e-12);
    CHECK(r.l_realness_g == doctest::Approx(2 * std::log(2.0)));
    CHECK(r.l_realness_d == doctest::Approx(4 * std::log(2.0)));
  }

  TEST_CASE("ground-truth translator reaches the interpolation floor") {
    const PoseRange r = mild_range();
    const StyleSpec style = StyleSpec::pointwise(0.7, 0.15);
    TrainConfig c;
    c.injection_range = r;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const TrainingPair pair = styled_pair(96, 10 + s, style, r);
      const LossReport rep = forward_losses(pair, pointwise_params(5, 0.7, 0.15), TranslatorParams::identity(),
                                            draw_injections(r, s), c);
      // two L1 terms, each at most the floor
      CHECK(rep.l_trans <= 2 * 2e-2);
    }
  }

  TEST_CASE("ablation switches touch only their own terms") {
    const PoseRange r = mild_range();
    const TrainingPair pair = styled_pair(64, 3, StyleSpec::pointwise(0.8, 0.1), r);
    TrainConfig c;
    c.injection_range = r;
    const Injections inj = draw_injections(r, 4);
    const TranslatorParams pt = pointwise_params(5, 0.9, 0.05), po = pointwise_params(5, 1.1, -0.05);
    const LossReport ref = forward_losses(pair, pt, po, inj, c);
    CHECK(ref.l_cycle > 0.0);
    CHECK(ref.l_xi_r > 0.0);

    TrainConfig nc = c;
    nc.ablate.no_cycle = true;
    const LossReport a = forward_losses(pair, pt, po, inj, nc);
    CHECK(a.l_cycle == 0.0);
    CHECK(a.l_trans == ref.l_trans);
    CHECK(a.l_xi_r == ref.l_xi_r);
    CHECK(a.l_theta_s == ref.l_theta_s);
    CHECK(a.l_realness_d == ref.l_realness_d);

    TrainConfig nx = c;
    nx.ablate.no_xi_r = true;
    const LossReport b = forward_losses(pair, pt, po, inj, nx);
    CHECK(b.l_xi_r == 0.0);
    CHECK(b.l_theta_s == ref.l_theta_s);
    CHECK(b.l_trans == ref.l_trans);
    CHECK(std::abs(ref.total_full - b.total_full - ref.l_xi_r) <= 1e-12);

    TrainConfig nt = c;
    nt.ablate.no_theta_s = true;
    const LossReport d = forward_losses(pair, pt, po, inj, nt);
    CHECK(d.l_theta_s == 0.0);
    CHECK(d.l_xi_r == ref.l_xi_r);

    TrainConfig basic = c;
    basic.mode = LossMode::basic;
    const LossReport e = forward_losses(pair, pt, po, inj, basic);
    CHECK(e.l_xi_r == 0.0);
    CHECK(e.l_theta_s == 0.0);
    CHECK(e.total_basic == ref.total_basic);

    TrainConfig np = c;
    np.ablate.no_pr = true;
    const LossReport f = forward_losses(pair, pt, po, inj, np);
    CHECK(f.l_trans != ref.l_trans);
    CHECK(f.l_cycle == ref.l_cycle);
    CHECK(f.l_xi_r == ref.l_xi_r);
  }

  TEST_CASE("finite-difference gradients") {
    const std::vector<double> p{0.3, -1.2, 2.5, 0.0};
    const auto g = grad_fd([](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    }, p, 1e-4);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(g[i] - 2 * p[i]) <= 1e-6);
    for (double h : {1e-6, 0.1, 3.0}) {
      const auto lin = grad_fd([](std::span<const double> x) { return 3 * x[0] - 0.5 * x[1] + 7; }, p, h);
      CHECK(lin[0] == doctest::Approx(3.0).epsilon(1e-9));
      CHECK(lin[1] == doctest::Approx(-0.5).epsilon(1e-9));
      CHECK(std::abs(lin[2]) <= 1e-9);
    }
    CHECK_THROWS_AS(grad_fd([](std::span<const double>) { return 1.0; }, p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(grad_fd([](std::span<const double> x) { return x[0] > 0.3 ? std::nan("") : 0.0; }, p, 1e-3),
                    std::domain_error);
  }

  TEST_CASE("loss gradient is consistent across step sizes") {
    const PoseRange r = mild_range();
    const TrainingPair pair = styled_pair(64, 5, StyleSpec::pointwise(0.7, 0.2), r);
    TrainConfig c;
    c.injection_range = r;
    c.kernel_size = 3;
    c.estimator.beta = 100;
    const Injections inj = draw_injections(r, 6);
    const TranslatorParams po = TranslatorParams::identity(3);
    const Objective f = [&](std::span<const double> p) {
      return forward_losses(pair, TranslatorParams::unflatten(p, 3), po, inj, c).objective();
    };
    const auto p0 = pointwise_params(3, 0.9, 0.1).flatten();
    const auto g3 = grad_fd(f, p0, 1e-3), g4 = grad_fd(f, p0, 1e-4);
    double norm = 0.0;
    for (double v : g4) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < g3.size(); ++i)
      CHECK(std::abs(g3[i] - g4[i]) <= 0.05 * std::max(std::abs(g4[i]), 0.05 * norm));
  }

  TEST_CASE("training is deterministic and honours a zero learning rate") {
    const PoseRange r = mild_range();
    const StyleSpec style = StyleSpec::pointwise(0.7, 0.2);
    std::vector<TrainingPair> corpus{styled_pair(48, 1, style, r), styled_pair(48, 2, style, r),
                                     styled_pair(48, 3, style, r)};
    TrainConfig c = small_config();
    const TrainResult a = train(corpus, c), b = train(corpus, c);
    REQUIRE(a.history.size() == 4u);
    CHECK(history_csv(a.history) == history_csv(b.history));
    CHECK(a.params_t.flatten() == b.params_t.flatten());
    CHECK(a.params_o.flatten() == b.params_o.flatten());

    TrainConfig frozen = c;
    frozen.learning_rate = 0.0;
    frozen.batch_size = 1;
    frozen.injection_range = PoseRange::identity();
    const std::vector<TrainingPair> one{corpus.front()};
    const TrainResult z = train(one, frozen);
    CHECK(z.params_t.flatten() == TranslatorParams::identity(3).flatten());
    CHECK(z.params_o.flatten() == TranslatorParams::identity(3).flatten());
    for (const auto& row : z.history) CHECK(row.report.objective() == z.history.front().report.objective());

    CHECK_THROWS_AS(train({}, c), std::invalid_argument);
  }

  TEST_CASE("best-so-far loss trends down at a small learning rate") {
    const PoseRange r = mild_range();
    const StyleSpec style = StyleSpec::pointwise(0.6, 0.25);
    std::vector<TrainingPair> corpus;
    for (std::uint64_t i = 0; i < 4; ++i) corpus.push_back(styled_pair(48, 20 + i, style, r));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      TrainConfig c = small_config();
      c.mode = LossMode::basic;
      c.learning_rate = 1e-3;
      c.steps = 12;
      c.batch_size = 4;  // whole corpus, so every step sees the same pairs
      c.seed = seed;
      const TrainResult res = train(corpus, c);
      double best = res.history.front().report.objective();
      for (const auto& row : res.history) {
        const double next = std::min(best, row.report.objective());
        CHECK(next <= best);
        best = next;
      }
      CHECK(best < res.history.front().report.objective());
    }
  }

  TEST_CASE("learning-rate schedule") {
    const PoseRange r = mild_range();
    const StyleSpec style = StyleSpec::pointwise(0.7, 0.2);
    const std::vector<TrainingPair> corpus{styled_pair(48, 4, style, r), styled_pair(48, 5, style, r)};
    TrainConfig cosine = small_config();
    cosine.mode = LossMode::basic;
    TrainConfig constant = cosine;
    constant.schedule = LrSchedule::constant;
    // The first step runs at the full rate under both schedules.
    cosine.steps = constant.steps = 1;
    CHECK(train(corpus, cosine).params_t.flatten() == train(corpus, constant).params_t.flatten());
    cosine.steps = constant.steps = 3;
    CHECK(train(corpus, cosine).params_t.flatten() != train(corpus, constant).params_t.flatten());
  }

  TEST_CASE("divergence aborts") {
    const PoseRange r = mild_range();
    std::vector<TrainingPair> corpus{styled_pair(32, 1, StyleSpec::pointwise(0.7, 0.2), r)};
    TrainConfig c = small_config();
    c.mode = LossMode::basic;
    c.learning_rate = 1e7;
    c.grad_clip = 0.0;
    c.steps = 5;
    c.batch_size = 1;
    CHECK_THROWS_AS(train(corpus, c), TrainingDiverged);
  }

  TEST_CASE("history and params serialization") {
    TrainResult res;
    res.params_t = TranslatorParams::identity(3);
    res.params_o = TranslatorParams::identity(3);
    res.history.push_back({0, aggregate({0.5, 0.25, 1, 2, 0.1, 0.2}, LossWeights{}, LossMode::full)});
    const std::string csv = history_csv(res.history);
    CHECK(csv.rfind("step,l_trans,l_cycle,", 0) == 0);
    CHECK(csv.find("\n0,0.5,0.25,") != std::string::npos);
    TrainConfig c;
    c.seed = 42;
    const nlohmann::json j = params_json(res, c);
    CHECK(j.at("seed").get<std::uint64_t>() == 42u);
    CHECK(j.at("params_t").at("kernel").size() == 3u);
  }

  TEST_CASE("evaluation") {
    const fs::path dir = fs::temp_directory_path() / "weakpair_test_eval";
    fs::remove_all(dir);
    const StyleSpec style = StyleSpec::pointwise(0.7, 0.2);
    PoseRange r;
    r.t_max = 10;
    std::vector<Image> sources;
    for (int i = 0; i < 3; ++i) sources.push_back(render_scene(96, 96, 60 + i));
    const CorpusPaths paths = generate_corpus(sources, dir, style, r, 4, 5);
    const Manifest ev = read_manifest(paths.eval_manifest);

    const TranslatorParams truth = pointwise_params(5, 0.7, 0.2);
    const EvalMetrics good = evaluate(truth, ev);
    const EvalMetrics bad = evaluate(TranslatorParams::identity(5), ev);
    REQUIRE(good.pairs.size() == 4u);
    CHECK(good.mean.l1_gt <= 2e-2);
    CHECK(good.mean.l1_gt < bad.mean.l1_gt);
    CHECK(good.mean.l1 < bad.mean.l1);
    for (const auto& p : good.pairs) CHECK(p.l1_gt == doctest::Approx(ground_truth_l1(truth, read_pgm(dir / ("images/" + p.id + "_original.pgm")), read_pgm(dir / ("images/" + p.id + "_target.pgm")), ev.xi[&p - good.pairs.data()])));

    const std::string csv = metrics_csv(good);
    CHECK(csv.rfind("id,l1,l1_gt,theta_err_deg,scale_err_pct,trans_err_px,success\n", 0) == 0);
    CHECK(csv.find("\nmean,") != std::string::npos);
    CHECK(csv.find("\nmedian,") != std::string::npos);

    CHECK_THROWS_AS(evaluate(truth, read_manifest(paths.manifest)), std::invalid_argument);
    Manifest empty = ev;
    empty.pairs.clear();
    empty.xi.clear();
    CHECK_THROWS_AS(evaluate(truth, empty), std::invalid_argument);
  }
}
