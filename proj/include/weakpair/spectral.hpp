#pragma once

#include <complex>
#include <vector>

#include "weakpair/image.hpp"

namespace weakpair {

/// Complex 2D spectrum, row-major, same layout as the image it came from.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> bins;

  std::complex<double>& at(int u, int v) { return bins[static_cast<std::size_t>(v) * width + u]; }
  const std::complex<double>& at(int u, int v) const {
    return bins[static_cast<std::size_t>(v) * width + u];
  }
};

/// Non-redundant half of a real image's spectrum: H rows of W/2+1 bins.
struct HalfSpectrum {
  int width = 0;   // of the real image
  int height = 0;
  std::vector<std::complex<double>> bins;
};

/// Forward real-to-complex 2D DFT (unnormalized).
HalfSpectrum rfft2(const Image& img);

/// Inverse of rfft2 with 1/(W*H) normalization.
Image irfft2(const HalfSpectrum& half);

/// Unnormalized forward 2D DFT.
Spectrum dft2(const Image& img);

/// Inverse 2D DFT with 1/(W*H) normalization.
Spectrum idft2(const Spectrum& spec);

/// Real part of idft2.
Image idft2_real(const Spectrum& spec);

/// Per-bin modulus with DC moved to (W/2, H/2).
Image magnitude_centered(const Spectrum& spec);
Image magnitude_centered(const HalfSpectrum& half);

/// Moves bin (0,0) to (W/2, H/2) with circular wrap.
Image fftshift(const Image& grid);

/// Multiplies by the separable window sin^2(pi n / (N-1)).
Image window_hann(const Image& img);

/// Radial emphasis filter for a centered magnitude image:
///   X = cos(pi/2 * r_hat), H = (1 - X)(2 - X) / 2,
/// with r_hat = min(1, r / (min(W,H)/2)) and r measured from (W/2, H/2).
/// H is 0 at the center, 1 at and beyond the outer radius, monotone between.
Image highpass(const Image& magnitude);

}  // namespace weakpair
