#include <array>

#include "doctest.h"
#include "oracles.hpp"
#include "weakpair/geometry.hpp"
#include "weakpair/losses.hpp"

using namespace weakpair;
using oracle::kPi;

namespace {

void check_pose(const Sim2Pose& a, const Sim2Pose& b, double tol) {
  CHECK(std::abs(a.scale - b.scale) <= tol);
  CHECK(angle_distance(a.theta, b.theta, 2 * kPi) <= tol);
  CHECK(std::abs(a.tx - b.tx) <= tol);
  CHECK(std::abs(a.ty - b.ty) <= tol);
}

Sim2Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.5 + u(rng), (u(rng) - 0.5) * 4 * kPi, (u(rng) - 0.5) * 80, (u(rng) - 0.5) * 80};
}

// 3x3 homogeneous matrix of q = s R (p - c) + c + t.
std::array<double, 9> matrix(const Sim2Pose& p, double cx, double cy) {
  const double a = p.scale * std::cos(p.theta), b = p.scale * std::sin(p.theta);
  // [[a, b], [-b, a]]
  return {a, b, cx + p.tx - (a * cx + b * cy), -b, a, cy + p.ty - (-b * cx + a * cy), 0, 0, 1};
}

std::array<double, 9> mul(const std::array<double, 9>& m, const std::array<double, 9>& n) {
  std::array<double, 9> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i * 3 + j] += m[i * 3 + k] * n[k * 3 + j];
  return r;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("compose identity and inverse") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
      const Sim2Pose p = random_pose(rng);
      const Sim2Pose q = compose(Sim2Pose::identity(), p);
      CHECK(std::abs(q.scale - p.scale) < 1e-12);
      CHECK(angle_distance(q.theta, p.theta, 2 * kPi) < 1e-12);
      const Sim2Pose id1 = compose(p, inverse(p));
      const Sim2Pose id2 = compose(inverse(p), p);
      for (const auto& id : {id1, id2}) {
        CHECK(std::abs(id.scale - 1.0) <= 1e-9);
        CHECK(angle_distance(id.theta, 0.0, 2 * kPi) <= 1e-9);
        CHECK(std::abs(id.tx) <= 1e-9);
        CHECK(std::abs(id.ty) <= 1e-9);
      }
    }
  }

  TEST_CASE("compose worked example") {
    const Sim2Pose r = compose({2, 0, 1, 0}, {1, 0, 3, 0});
    CHECK(r.scale == doctest::Approx(2.0));
    CHECK(std::abs(r.theta) < 1e-12);
    CHECK(r.tx == doctest::Approx(7.0));
    CHECK(std::abs(r.ty) < 1e-12);
  }

  TEST_CASE("compose is the matrix product and associative") {
    std::mt19937_64 rng(2);
    // compose uses the same center for both factors; any center works for the
    // matrix identity, so use an arbitrary one.
    const double cx = 31.5, cy = 20.5;
    for (int i = 0; i < 30; ++i) {
      const Sim2Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
      const auto want = mul(matrix(a, cx, cy), matrix(b, cx, cy));
      const auto got = matrix(compose(a, b), cx, cy);
      for (int k = 0; k < 9; ++k) CHECK(std::abs(want[k] - got[k]) <= 1e-9);
      const Sim2Pose l = compose(compose(a, b), c), r = compose(a, compose(b, c));
      CHECK(std::abs(l.scale - r.scale) <= 1e-9);
      CHECK(angle_distance(l.theta, r.theta, 2 * kPi) <= 1e-9);
      CHECK(std::abs(l.tx - r.tx) <= 1e-9);
      CHECK(std::abs(l.ty - r.ty) <= 1e-9);
    }
  }

  TEST_CASE("affine round trip") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
      const Sim2Pose p = random_pose(rng);
      check_pose(from_affine(to_affine(p)), p, 1e-9);
    }
  }

  TEST_CASE("warp identity is exact") {
    const Image img = oracle::noise(17, 11, 4);
    CHECK(warp(img, Sim2Pose::identity()) == img);
  }

  TEST_CASE("warp integer shift equals index shift") {
    const Image img = oracle::noise(20, 15, 5);
    for (auto [dx, dy] : {std::pair{3, -2}, {-5, 4}, {0, 7}}) {
      const Image out = warp(img, {1.0, 0.0, double(dx), double(dy)});
      for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 20; ++x) {
          const int sx = x - dx, sy = y - dy;
          const double want = (sx >= 0 && sx < 20 && sy >= 0 && sy < 15) ? img.at(sx, sy) : 0.0;
          CHECK(out.at(x, y) == want);
        }
    }
  }

  TEST_CASE("warp round trip on a smooth image") {
    const Image img = oracle::smooth(96, 96, 6);
    const Sim2Pose p{1.1, 0.6, 5.5, -3.25};
    const Image back = warp(warp(img, p), inverse(p));
    // back(q) reads img at q through p(q), so p(q) must land inside
    const Mask mask = valid_mask(96, 96, inverse(p)).eroded(2);
    REQUIRE(mask.count() > 0);
    CHECK(l1_masked(back, img, mask) <= 2e-2);
  }

  TEST_CASE("rotation fixes the center pixel") {
    Image delta(33, 33, 0.0);
    delta.at(16, 16) = 1.0;
    const Image out = warp(delta, {1.0, kPi / 2, 0, 0});
    CHECK(out.at(16, 16) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("positive theta turns counter-clockwise on screen") {
    // A pixel to the right of the center moves up (smaller y).
    Image img(41, 41, 0.0);
    img.at(30, 20) = 1.0;
    const Image out = warp(img, {1.0, kPi / 2, 0, 0});
    CHECK(out.at(20, 10) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("warp output is finite and keeps shape") {
    const Image img = oracle::noise(23, 19, 7);
    const Image out = warp(img, {0.83, 2.5, 40.0, -12.0});
    CHECK(out.same_shape(img));
    for (double v : out.pixels()) CHECK(std::isfinite(v));
  }

  TEST_CASE("warp rejects bad input") {
    const Image img = oracle::noise(8, 8, 8);
    CHECK_THROWS(warp(img, {1.0, std::nan(""), 0, 0}));
    CHECK_THROWS(warp(img, {0.0, 0.0, 0, 0}));
    CHECK_THROWS(warp(Image(), Sim2Pose::identity()));
  }

  TEST_CASE("overlap mask geometry") {
    CHECK(overlap_mask(16, 12, Sim2Pose::identity(), Sim2Pose::identity()).count() == 16u * 12u);
    const Mask m = overlap_mask(256, 256, {1, 0, 50, 0}, Sim2Pose::identity());
    CHECK(m.count() == 206u * 256u);
    CHECK(valid_mask(64, 64, {1.0, kPi / 4, 0, 0}).count() < 64u * 64u);
  }

  TEST_CASE("angle helpers") {
    CHECK(wrap_angle(-0.5, kPi) == doctest::Approx(kPi - 0.5));
    CHECK(wrap_angle(7.0, 2 * kPi) == doctest::Approx(7.0 - 2 * kPi));
    CHECK(angle_distance(0.1, 2 * kPi - 0.1, 2 * kPi) == doctest::Approx(0.2));
  }
}
