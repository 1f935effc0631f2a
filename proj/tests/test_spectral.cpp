#include "doctest.h"
#include "oracles.hpp"
#include "weakpair/spectral.hpp"

using namespace weakpair;

namespace {

double max_abs_diff(const Spectrum& s, const std::vector<std::complex<double>>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(s.bins[i] - ref[i]));
  return worst;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("dft2 matches the direct sum") {
    for (auto [w, h] : {std::pair{8, 8}, {13, 13}, {12, 7}, {9, 16}}) {
      const Image img = oracle::noise(w, h, 100 + w * h);
      CHECK(max_abs_diff(dft2(img), oracle::direct_dft(img)) <= 1e-9);
    }
  }

  TEST_CASE("dft2 of a constant and an impulse") {
    const Spectrum c = dft2(Image(10, 6, 0.3));
    CHECK(std::abs(c.at(0, 0) - std::complex<double>(0.3 * 60, 0)) < 1e-12);
    for (std::size_t i = 1; i < c.bins.size(); ++i) CHECK(std::abs(c.bins[i]) < 1e-12);
    Image impulse(7, 9, 0.0);
    impulse.at(0, 0) = 1.0;
    for (const auto& b : dft2(impulse).bins) CHECK(std::abs(b - 1.0) < 1e-12);
  }

  TEST_CASE("inverse reproduces the input") {
    const Image img = oracle::noise(15, 10, 3);
    const Image back = idft2_real(dft2(img));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(back.pixels()[i] - img.pixels()[i]) <= 1e-9);
    const Image back2 = irfft2(rfft2(img));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(back2.pixels()[i] - img.pixels()[i]) <= 1e-9);
  }

  TEST_CASE("parseval") {
    for (auto [w, h] : {std::pair{8, 8}, {13, 13}, {64, 48}}) {
      const Image img = oracle::noise(w, h, 7 + w);
      double e_img = 0.0, e_spec = 0.0;
      for (double v : img.pixels()) e_img += v * v;
      for (const auto& b : dft2(img).bins) e_spec += std::norm(b);
      CHECK(std::abs(e_img * w * h - e_spec) <= 1e-6 * e_spec);
    }
  }

  TEST_CASE("magnitude matches the oracle modulus, centered") {
    const Image img = oracle::noise(11, 8, 9);
    const auto ref = oracle::direct_dft(img);
    const Image mag = magnitude_centered(dft2(img));
    const Image mag_half = magnitude_centered(rfft2(img));
    for (int v = 0; v < 8; ++v)
      for (int u = 0; u < 11; ++u) {
        const double want = std::abs(ref[v * 11 + u]);
        const int x = (u + 11 / 2) % 11, y = (v + 8 / 2) % 8;
        CHECK(std::abs(mag.at(x, y) - want) <= 1e-9);
        CHECK(std::abs(mag_half.at(x, y) - want) <= 1e-9);
      }
  }

  TEST_CASE("magnitude is invariant to circular shifts") {
    const Image img = oracle::noise(16, 12, 10);
    const Image a = magnitude_centered(dft2(img));
    const Image b = magnitude_centered(dft2(oracle::roll(img, 5, -3)));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.pixels()[i] - b.pixels()[i]) <= 1e-9);
  }

  TEST_CASE("constant image has a single centered magnitude pixel") {
    const Image mag = magnitude_centered(dft2(Image(9, 6, 0.5)));
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 9; ++x) {
        if (x == 4 && y == 3) CHECK(mag.at(x, y) == doctest::Approx(27.0));
        else CHECK(mag.at(x, y) < 1e-12);
      }
  }

  TEST_CASE("hann window") {
    Image row(4, 1, 1.0);
    const Image w = window_hann(row);
    CHECK(std::abs(w.at(0, 0)) < 1e-15);
    CHECK(w.at(1, 0) == doctest::Approx(0.75));
    CHECK(w.at(2, 0) == doctest::Approx(0.75));
    CHECK(std::abs(w.at(3, 0)) < 1e-15);

    const Image img = oracle::noise(9, 7, 11);
    const Image out = window_hann(img);
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(8, 6) == doctest::Approx(0.0));
    CHECK(out.at(4, 3) == doctest::Approx(img.at(4, 3)).epsilon(1e-12));
  }

  TEST_CASE("highpass profile") {
    const int n = 64;
    const Image h = highpass(Image(n, n, 1.0));
    CHECK(h.at(n / 2, n / 2) == 0.0);
    // outermost radius along the axis and the corners are untouched
    CHECK(h.at(0, n / 2) == doctest::Approx(1.0));
    CHECK(h.at(0, 0) == 1.0);
    double prev = -1.0;
    for (int x = n / 2; x >= 0; --x) {
      CHECK(h.at(x, n / 2) >= prev);
      prev = h.at(x, n / 2);
    }
    const Image scaled = highpass(Image(n, n, 3.0));
    CHECK(scaled.at(n / 2 + 5, n / 2) == doctest::Approx(3.0 * h.at(n / 2 + 5, n / 2)));
  }

  TEST_CASE("fftshift moves DC to the center") {
    Image g(6, 5, 0.0);
    g.at(0, 0) = 1.0;
    CHECK(fftshift(g).at(3, 2) == 1.0);
  }
}
