#pragma once

#include "weakpair/image.hpp"

namespace weakpair {

/// Log-polar resampling of a centered magnitude image.
///
/// Row i holds angle i * pi / n_theta (half turn only, the magnitude of a
/// real signal's spectrum is point-symmetric). Column j holds radius
/// r_min * rho_base^j, with rho_base chosen so the last column lands on r_max.
struct LogPolarGrid {
  int n_theta = 0;
  int n_rho = 0;
  double r_min = 1.0;
  double r_max = 1.0;
  double rho_base = 1.0;
  Image values;  // width n_rho, height n_theta

  double angle_bin_width() const;
};

/// Samples `img` about the DC bin (W/2, H/2), integer division, with r_min = 1
/// and r_max = min(W,H)/2.
/// Throws ValidationError if n_theta or n_rho is below 8.
LogPolarGrid to_logpolar(const Image& img, int n_theta, int n_rho);

/// Radius ratio between neighbouring columns for the given frame.
double logpolar_rho_base(int width, int height, int n_rho);

}  // namespace weakpair
