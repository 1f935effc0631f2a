#pragma once

#include "weakpair/image.hpp"

namespace weakpair {

/// What the axes of a correlation-derived distribution mean.
/// Translation grids are plain shifts on both axes. Log-polar grids carry
/// angle on rows (periodic) and log-radius on columns.
enum class AxisKind { translation, logpolar };

/// Nonnegative grid summing to one.
struct PoseDistribution {
  Image probs;
  AxisKind kind = AxisKind::translation;

  int width() const { return probs.width(); }
  int height() const { return probs.height(); }
};

/// Fractional (row, col) grid coordinate.
struct BinCoord {
  double row = 0.0;
  double col = 0.0;
};

inline constexpr double kCrossPowerEpsilon = 1e-8;

/// Phase correlation surface of `a` against `b`.
///
/// Inverse DFT of F(a) conj(F(b)) / (|F(a) conj(F(b))| + eps), shifted so
/// zero displacement sits at (W/2, H/2). If a = roll(b, d) the peak is at
/// center + d. Throws ValidationError on shape mismatch.
Grid correlate(const Grid& a, const Grid& b);

/// Softmax with inverse temperature beta over every bin.
PoseDistribution to_distribution(const Grid& corr, double beta, AxisKind kind);

/// Per-axis expected bin coordinate. For log-polar grids the row axis uses a
/// circular mean over a period of `height` rows; the result lies in
/// [0, height).
BinCoord expectation(const PoseDistribution& dist);

/// Analytic derivative of expectation(to_distribution(corr, beta, kind))
/// with respect to corr at (row, col).
BinCoord expectation_derivative(const Grid& corr, double beta, AxisKind kind, int row, int col);

struct Peak {
  double row = 0.0;
  double col = 0.0;
  double value = 0.0;
  bool low_confidence = false;  // not a strict local maximum (e.g. flat grid)
};

/// Integer argmax (lowest row, then lowest column on ties) refined per axis
/// by a 3-point parabola, offset clamped to +-0.5 bin. Neighbours wrap.
Peak argmax_refined(const Grid& corr);

}  // namespace weakpair
