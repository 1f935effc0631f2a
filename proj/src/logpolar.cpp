#include "weakpair/logpolar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakpair/error.hpp"

namespace weakpair {

double LogPolarGrid::angle_bin_width() const { return std::numbers::pi / n_theta; }

double logpolar_rho_base(int width, int height, int n_rho) {
  const double r_max = 0.5 * std::min(width, height);
  return std::exp(std::log(r_max / 1.0) / (n_rho - 1));
}

namespace {

double bilinear_or_zero(const Image& img, double sx, double sy) {
  const int w = img.width();
  const int h = img.height();
  if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1) return 0.0;
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bot * fy;
}

}  // namespace

LogPolarGrid to_logpolar(const Image& img, int n_theta, int n_rho) {
  if (n_theta < 8 || n_rho < 8) throw ValidationError("log-polar grid needs at least 8x8 bins");
  if (img.empty()) throw ValidationError("log-polar: empty image");

  LogPolarGrid grid;
  grid.n_theta = n_theta;
  grid.n_rho = n_rho;
  grid.r_min = 1.0;
  grid.r_max = 0.5 * std::min(img.width(), img.height());
  grid.rho_base = logpolar_rho_base(img.width(), img.height(), n_rho);
  grid.values = Image(n_rho, n_theta);

  const double cx = img.width() / 2;
  const double cy = img.height() / 2;
  std::vector<double> radii(static_cast<std::size_t>(n_rho));
  for (int j = 0; j < n_rho; ++j) radii[j] = grid.r_min * std::pow(grid.rho_base, j);

  for (int i = 0; i < n_theta; ++i) {
    const double angle = i * grid.angle_bin_width();
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (int j = 0; j < n_rho; ++j)
      grid.values.at(j, i) = bilinear_or_zero(img, cx + radii[j] * c, cy + radii[j] * s);
  }
  return grid;
}

}  // namespace weakpair
