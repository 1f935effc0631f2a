#include "weakpair/selftest.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "weakpair/dataset.hpp"
#include "weakpair/estimator.hpp"
#include "weakpair/losses.hpp"
#include "weakpair/scene.hpp"
#include "weakpair/spectral.hpp"
#include "weakpair/trainer.hpp"

namespace weakpair {
namespace {

constexpr double kPi = std::numbers::pi;

Image noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(w, h);
  for (double& v : img.pixels()) v = u(rng);
  return img;
}

bool dft_matches_direct_sum() {
  const Image img = noise(8, 8, 11);
  const Spectrum s = dft2(img);
  double worst = 0.0;
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      std::complex<double> acc;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          acc += img.at(x, y) * std::polar(1.0, -2.0 * kPi * (u * x + v * y) / 8.0);
      worst = std::max(worst, std::abs(acc - s.bins[v * 8 + u]));
    }
  return worst < 1e-9;
}

bool parseval() {
  const Image img = noise(13, 9, 12);
  const Spectrum s = dft2(img);
  double e_img = 0.0, e_spec = 0.0;
  for (double v : img.pixels()) e_img += v * v;
  for (const auto& c : s.bins) e_spec += std::norm(c);
  e_img *= img.size();
  return std::abs(e_img - e_spec) <= 1e-6 * e_spec;
}

bool inverse_composes_to_identity() {
  const Sim2Pose p{1.13, 2.2, -7.5, 3.25};
  const Sim2Pose q = compose(inverse(p), p);
  return std::abs(q.scale - 1) < 1e-9 && std::abs(wrap_angle(q.theta, 2 * kPi)) < 1e-9 &&
         std::abs(q.tx) < 1e-9 && std::abs(q.ty) < 1e-9;
}

bool integer_shift_is_exact() {
  const Image img = noise(16, 12, 13);
  const Image out = warp(img, {1.0, 0.0, 3.0, -2.0});
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) {
      const int sx = x - 3, sy = y + 2;
      const double want = (sx >= 0 && sx < 16 && sy >= 0 && sy < 12) ? img.at(sx, sy) : 0.0;
      if (out.at(x, y) != want) return false;
    }
  return true;
}

bool recovers_similarity() {
  const Image moving = render_scene(128, 128, 21);
  const Sim2Pose xi{1.08, 0.7, 9.0, -6.0};
  const PoseEstimate est = estimate_sim2(moving, warp(moving, xi));
  const double dth = angle_distance(est.pose.theta, xi.theta, 2 * kPi) * 180 / kPi;
  return dth <= 2.0 && std::abs(est.pose.scale / xi.scale - 1) <= 0.02 &&
         std::hypot(est.pose.tx - xi.tx, est.pose.ty - xi.ty) <= 2.0;
}

bool expectation_derivative_matches_fd() {
  Image corr = noise(16, 16, 14);
  const double beta = 5.0, h = 1e-6;
  const BinCoord d = expectation_derivative(corr, beta, AxisKind::translation, 4, 9);
  const double saved = corr.at(9, 4);
  corr.at(9, 4) = saved + h;
  const BinCoord up = expectation(to_distribution(corr, beta, AxisKind::translation));
  corr.at(9, 4) = saved - h;
  const BinCoord down = expectation(to_distribution(corr, beta, AxisKind::translation));
  const double fr = (up.row - down.row) / (2 * h), fc = (up.col - down.col) / (2 * h);
  return std::abs(fr - d.row) <= 1e-4 * std::max(1.0, std::abs(d.row)) &&
         std::abs(fc - d.col) <= 1e-4 * std::max(1.0, std::abs(d.col));
}

bool kld_identities() {
  PoseDistribution u{Image(4, 5, 1.0 / 20), AxisKind::translation};
  PoseDistribution delta{Image(4, 5, 0.0), AxisKind::translation};
  delta.probs.at(1, 2) = 1.0;
  return kld(u, u) <= 1e-9 && std::abs(kld(delta, u) - std::log(20.0)) <= 1e-6;
}

bool pointwise_style_commutes() {
  const Image img = render_scene(64, 64, 15);
  const StyleSpec style = StyleSpec::pointwise(0.7, 0.1);
  const Sim2Pose xi{0.95, 0.4, 3.0, -2.0};
  const Mask mask = valid_mask(64, 64, xi).eroded(1);
  return l1_masked(apply_style(warp(img, xi), style), warp(apply_style(img, style), xi), mask) <= 2e-2;
}

bool identity_translator() {
  const Image img = noise(9, 7, 16);
  return translate(img, TranslatorParams::identity(5)) == img;
}

bool fd_gradient_of_quadratic() {
  const std::vector<double> p{0.5, -1.25, 2.0};
  const auto g = grad_fd([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }, p, 1e-4);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(g[i] - 2 * p[i]) > 1e-6) return false;
  return true;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks{
      {"dft2 direct sum", dft_matches_direct_sum},
      {"parseval", parseval},
      {"inverse compose", inverse_composes_to_identity},
      {"integer shift warp", integer_shift_is_exact},
      {"sim2 recovery", recovers_similarity},
      {"soft readout derivative", expectation_derivative_matches_fd},
      {"kld identities", kld_identities},
      {"pointwise style commutes", pointwise_style_commutes},
      {"identity translator", identity_translator},
      {"fd gradient", fd_gradient_of_quadratic},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "error " << name << ": " << e.what() << '\n';
    }
    out << (ok ? "ok   " : "FAIL ") << name << '\n';
    failed += ok ? 0 : 1;
  }
  return failed;
}

}  // namespace weakpair
