#include "weakpair/phasecorr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakpair/error.hpp"
#include "weakpair/spectral.hpp"

namespace weakpair {

Grid correlate(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw ValidationError("correlate: dimension mismatch");
  if (a.empty()) throw ValidationError("correlate: empty grid");
  HalfSpectrum fa = rfft2(a);
  const HalfSpectrum fb = rfft2(b);
  for (std::size_t i = 0; i < fa.bins.size(); ++i) {
    const std::complex<double> cross = fa.bins[i] * std::conj(fb.bins[i]);
    fa.bins[i] = cross / (std::sqrt(std::norm(cross)) + kCrossPowerEpsilon);
  }
  return fftshift(irfft2(fa));
}

PoseDistribution to_distribution(const Grid& corr, double beta, AxisKind kind) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be positive");
  if (corr.empty()) throw ValidationError("to_distribution: empty grid");
  const auto px = corr.pixels();
  const double top = *std::max_element(px.begin(), px.end());
  Image probs(corr.width(), corr.height());
  double total = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    probs.pixels()[i] = std::exp(beta * (px[i] - top));
    total += probs.pixels()[i];
  }
  for (double& p : probs.pixels()) p /= total;
  return {std::move(probs), kind};
}

namespace {

struct Moments {
  double mean_col = 0.0;
  double mean_row = 0.0;  // linear rows only
  double cos_sum = 0.0;   // circular rows only
  double sin_sum = 0.0;
};

Moments moments(const Image& probs, AxisKind kind) {
  Moments m;
  const int h = probs.height();
  for (int y = 0; y < h; ++y) {
    double row_mass = 0.0;
    for (int x = 0; x < probs.width(); ++x) {
      const double p = probs.at(x, y);
      row_mass += p;
      m.mean_col += p * x;
    }
    if (kind == AxisKind::logpolar) {
      const double a = 2.0 * std::numbers::pi * y / h;
      m.cos_sum += row_mass * std::cos(a);
      m.sin_sum += row_mass * std::sin(a);
    } else {
      m.mean_row += row_mass * y;
    }
  }
  return m;
}

double circular_row(double cos_sum, double sin_sum, int height) {
  double a = std::atan2(sin_sum, cos_sum);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  double row = a * height / (2.0 * std::numbers::pi);
  if (row >= height) row -= height;
  return row;
}

}  // namespace

BinCoord expectation(const PoseDistribution& dist) {
  const Moments m = moments(dist.probs, dist.kind);
  BinCoord out;
  out.col = m.mean_col;
  out.row = dist.kind == AxisKind::logpolar ? circular_row(m.cos_sum, m.sin_sum, dist.height())
                                            : m.mean_row;
  return out;
}

BinCoord expectation_derivative(const Grid& corr, double beta, AxisKind kind, int row, int col) {
  const PoseDistribution dist = to_distribution(corr, beta, kind);
  const Moments m = moments(dist.probs, kind);
  const double pk = dist.probs.at(col, row);
  BinCoord d;
  // d p_i / d c_k = beta p_i (delta_ik - p_k), so d E[f] / d c_k = beta p_k (f_k - E[f]).
  d.col = beta * pk * (col - m.mean_col);
  if (kind == AxisKind::logpolar) {
    const int h = corr.height();
    const double a = 2.0 * std::numbers::pi * row / h;
    const double dc = beta * pk * (std::cos(a) - m.cos_sum);
    const double ds = beta * pk * (std::sin(a) - m.sin_sum);
    const double r2 = m.cos_sum * m.cos_sum + m.sin_sum * m.sin_sum;
    const double dangle = (m.cos_sum * ds - m.sin_sum * dc) / r2;
    d.row = dangle * h / (2.0 * std::numbers::pi);
  } else {
    d.row = beta * pk * (row - m.mean_row);
  }
  return d;
}

namespace {

double parabolic_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

Peak argmax_refined(const Grid& corr) {
  if (corr.empty()) throw ValidationError("argmax_refined: empty grid");
  const int w = corr.width();
  const int h = corr.height();
  int bx = 0, by = 0;
  double best = corr.at(0, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (corr.at(x, y) > best) {
        best = corr.at(x, y);
        bx = x;
        by = y;
      }
    }
  }
  const double left = corr.at((bx + w - 1) % w, by);
  const double right = corr.at((bx + 1) % w, by);
  const double up = corr.at(bx, (by + h - 1) % h);
  const double down = corr.at(bx, (by + 1) % h);

  Peak peak;
  peak.value = best;
  peak.col = bx + (w > 2 ? parabolic_offset(left, best, right) : 0.0);
  peak.row = by + (h > 2 ? parabolic_offset(up, best, down) : 0.0);
  peak.low_confidence = !(best > left && best > right && best > up && best > down);
  return peak;
}

}  // namespace weakpair
