#include "weakpair/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

namespace weakpair {

namespace {

enum class PlanKind { forward_r2c, inverse_c2r, complex_backward };

// FFTW planning is not thread-safe; execution on fresh buffers is. Plans are
// made once per (size, kind) under a lock and reused through the new-array
// execute interface. FFTW_ESTIMATE keeps plan choice, and therefore the
// floating-point results, identical across runs.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int width, int height, PlanKind kind) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(width, height, static_cast<int>(kind));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(width) * height;
    double* real = fftw_alloc_real(n);
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::forward_r2c:
        plan = fftw_plan_dft_r2c_2d(height, width, real, a, FFTW_ESTIMATE);
        break;
      case PlanKind::inverse_c2r:
        plan = fftw_plan_dft_c2r_2d(height, width, a, real, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        break;
      case PlanKind::complex_backward:
        plan = fftw_plan_dft_2d(height, width, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    fftw_free(real);
    fftw_free(a);
    fftw_free(b);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter<fftw_complex>>;
using RealBuffer = std::unique_ptr<double[], FftwDeleter<double>>;

static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));

Spectrum run_complex(const Spectrum& in, PlanKind kind) {
  const std::size_t n = in.bins.size();
  ComplexBuffer src(fftw_alloc_complex(n));
  ComplexBuffer dst(fftw_alloc_complex(n));
  std::memcpy(static_cast<void*>(src.get()), in.bins.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(PlanCache::instance().get(in.width, in.height, kind), src.get(), dst.get());
  Spectrum out{in.width, in.height, std::vector<std::complex<double>>(n)};
  std::memcpy(static_cast<void*>(out.bins.data()), dst.get(), n * sizeof(fftw_complex));
  return out;
}

}  // namespace

HalfSpectrum rfft2(const Image& img) {
  const int w = img.width();
  const int h = img.height();
  HalfSpectrum out{w, h, std::vector<std::complex<double>>(static_cast<std::size_t>(h) * (w / 2 + 1))};
  if (img.empty()) return out;
  RealBuffer src(fftw_alloc_real(img.size()));
  ComplexBuffer dst(fftw_alloc_complex(out.bins.size()));
  std::copy(img.pixels().begin(), img.pixels().end(), src.get());
  fftw_execute_dft_r2c(PlanCache::instance().get(w, h, PlanKind::forward_r2c), src.get(), dst.get());
  std::memcpy(static_cast<void*>(out.bins.data()), dst.get(), out.bins.size() * sizeof(fftw_complex));
  return out;
}

Image irfft2(const HalfSpectrum& half) {
  const int w = half.width;
  const int h = half.height;
  Image out(w, h);
  if (out.empty()) return out;
  ComplexBuffer src(fftw_alloc_complex(half.bins.size()));
  RealBuffer dst(fftw_alloc_real(out.size()));
  std::memcpy(static_cast<void*>(src.get()), half.bins.data(), half.bins.size() * sizeof(fftw_complex));
  fftw_execute_dft_c2r(PlanCache::instance().get(w, h, PlanKind::inverse_c2r), src.get(), dst.get());
  const double norm = 1.0 / static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] = dst[i] * norm;
  return out;
}

Spectrum dft2(const Image& img) {
  const int w = img.width();
  const int h = img.height();
  const HalfSpectrum half = rfft2(img);
  Spectrum s{w, h, std::vector<std::complex<double>>(img.size())};
  const int hw = w / 2 + 1;
  // Real input: F(u, v) = conj(F(-u, -v)).
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (u < hw) {
        s.at(u, v) = half.bins[static_cast<std::size_t>(v) * hw + u];
      } else {
        const int mu = w - u;
        const int mv = (h - v) % h;
        s.at(u, v) = std::conj(half.bins[static_cast<std::size_t>(mv) * hw + mu]);
      }
    }
  }
  return s;
}

Spectrum idft2(const Spectrum& spec) {
  if (spec.bins.empty()) return spec;
  Spectrum out = run_complex(spec, PlanKind::complex_backward);
  const double norm = 1.0 / static_cast<double>(out.bins.size());
  for (auto& c : out.bins) c *= norm;
  return out;
}

Image idft2_real(const Spectrum& spec) {
  const Spectrum s = idft2(spec);
  Image out(s.width, s.height);
  for (std::size_t i = 0; i < s.bins.size(); ++i) out.pixels()[i] = s.bins[i].real();
  return out;
}

Image fftshift(const Image& grid) {
  const int w = grid.width();
  const int h = grid.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at((x + w / 2) % w, (y + h / 2) % h) = grid.at(x, y);
  return out;
}

Image magnitude_centered(const Spectrum& spec) {
  const int w = spec.width;
  const int h = spec.height;
  Image out(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      out.at((u + w / 2) % w, (v + h / 2) % h) = std::sqrt(std::norm(spec.at(u, v)));
  return out;
}

Image magnitude_centered(const HalfSpectrum& half) {
  const int w = half.width;
  const int h = half.height;
  const int hw = w / 2 + 1;
  Image out(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < hw; ++u) {
      const double m = std::sqrt(std::norm(half.bins[static_cast<std::size_t>(v) * hw + u]));
      out.at((u + w / 2) % w, (v + h / 2) % h) = m;
      // Mirror bin (-u, -v) has the same modulus.
      out.at((w - u + w / 2) % w, ((h - v) % h + h / 2) % h) = m;
    }
  }
  return out;
}

namespace {

std::vector<double> hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n < 2) return w;
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(std::numbers::pi * i / (n - 1));
    w[i] = s * s;
  }
  return w;
}

}  // namespace

Image window_hann(const Image& img) {
  const auto wx = hann(img.width());
  const auto wy = hann(img.height());
  Image out = img;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) *= wx[x] * wy[y];
  return out;
}

Image highpass(const Image& magnitude) {
  const int w = magnitude.width();
  const int h = magnitude.height();
  const double cx = w / 2;
  const double cy = h / 2;
  const double r_max = 0.5 * std::min(w, h);
  Image out = magnitude;
  if (r_max <= 0.0) return out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r_hat = std::hypot(x - cx, y - cy) / r_max;
      if (r_hat >= 1.0) continue;
      const double c = std::cos(0.5 * std::numbers::pi * r_hat);
      out.at(x, y) *= 0.5 * (1.0 - c) * (2.0 - c);
    }
  }
  return out;
}

}  // namespace weakpair
