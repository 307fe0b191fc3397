#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include "msplace/error.hpp"
#include "msplace/features.hpp"

namespace msplace {

namespace {

// The FFTW planner is not thread-safe; executing a plan on fresh buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Plans are created once per image size with FFTW_ESTIMATE, which keeps them
// deterministic across runs, and live until process exit.
PlanPair plans_for(int width, int height) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({width, height});
  if (it != cache.end()) return it->second;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  PlanPair p;
  p.forward = fftw_plan_dft_2d(height, width, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_2d(height, width, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(std::make_pair(width, height), p);
  return p;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

double frequency(int k, int n) {
  const int shifted = k <= n / 2 ? k : k - n;
  return static_cast<double>(shifted) / n;
}

using FilterBank = std::vector<std::vector<double>>;

double gist_filter_response_impl(const GistConfig& cfg, int scale, int orientation, double u, double v);

// Gains per (scale, orientation) over the FFT grid, cached per size and
// config; entries are immutable once published.
std::shared_ptr<const FilterBank> filters_for(const GistConfig& cfg, int width, int height) {
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const FilterBank>> cache;
  static std::mutex m;
  const auto key = std::make_tuple(width, height, cfg.scales, cfg.orientations);
  std::lock_guard lock(m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto bank = std::make_shared<FilterBank>();
  for (int s = 0; s < cfg.scales; ++s) {
    for (int o = 0; o < cfg.orientations; ++o) {
      std::vector<double> gains(static_cast<std::size_t>(width) * height);
      for (int ky = 0; ky < height; ++ky) {
        const double v = frequency(ky, height);
        for (int kx = 0; kx < width; ++kx) {
          gains[static_cast<std::size_t>(ky) * width + kx] =
              gist_filter_response_impl(cfg, s, o, frequency(kx, width), v);
        }
      }
      bank->push_back(std::move(gains));
    }
  }
  cache.emplace(key, bank);
  return bank;
}

}  // namespace

Index gist_length(const GistConfig& cfg) {
  return static_cast<Index>(cfg.orientations) * cfg.scales * cfg.grid * cfg.grid;
}

double gist_center_frequency(int scale) { return 0.25 / std::pow(2.0, scale); }

double gist_filter_response(const GistConfig& cfg, int scale, int orientation, double u, double v) {
  return gist_filter_response_impl(cfg, scale, orientation, u, v);
}

namespace {

double gist_filter_response_impl(const GistConfig& cfg, int scale, int orientation, double u, double v) {
  if (u == 0.0 && v == 0.0) return 0.0;
  const double f0 = gist_center_frequency(scale);
  const double theta = std::numbers::pi * orientation / cfg.orientations;
  const double sigma_r = f0 / 3.0;
  const double sigma_t = f0 * std::tan(std::numbers::pi / (2.0 * cfg.orientations));
  const double ur = u * std::cos(theta) + v * std::sin(theta);
  const double vr = -u * std::sin(theta) + v * std::cos(theta);
  const double dr = ur - f0;
  return std::exp(-dr * dr / (2.0 * sigma_r * sigma_r) - vr * vr / (2.0 * sigma_t * sigma_t));
}

}  // namespace

Vector gist(const ImageFrame& frame, const GistConfig& cfg) {
  frame.validate();
  if (frame.width < 32 || frame.height < 32) {
    throw ValidationError("frame '" + frame.image_id + "' is too small for GIST (needs 32x32)");
  }
  const int w = frame.width;
  const int h = frame.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const PlanPair plans = plans_for(w, h);
  const auto bank = filters_for(cfg, w, h);

  FftwBuffer spatial(n);
  FftwBuffer spectrum(n);
  FftwBuffer product(n);
  for (std::size_t i = 0; i < n; ++i) {
    spatial.data[i][0] = frame.pixels[i];
    spatial.data[i][1] = 0.0;
  }
  fftw_execute_dft(plans.forward, spatial.data, spectrum.data);

  const int g = cfg.grid;
  Vector out(gist_length(cfg));
  Index slot = 0;
  std::vector<double> cell_sum(static_cast<std::size_t>(g) * g);
  std::vector<int> cell_count(static_cast<std::size_t>(g) * g);
  for (int s = 0; s < cfg.scales; ++s) {
    for (int o = 0; o < cfg.orientations; ++o) {
      const std::vector<double>& gains = (*bank)[static_cast<std::size_t>(s * cfg.orientations + o)];
      for (std::size_t i = 0; i < n; ++i) {
        product.data[i][0] = spectrum.data[i][0] * gains[i];
        product.data[i][1] = spectrum.data[i][1] * gains[i];
      }
      fftw_execute_dft(plans.inverse, product.data, spatial.data);
      std::fill(cell_sum.begin(), cell_sum.end(), 0.0);
      std::fill(cell_count.begin(), cell_count.end(), 0);
      for (int y = 0; y < h; ++y) {
        const int cy = y * g / h;
        for (int x = 0; x < w; ++x) {
          const int cx = x * g / w;
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          const double mag = std::hypot(spatial.data[i][0], spatial.data[i][1]) / static_cast<double>(n);
          cell_sum[static_cast<std::size_t>(cy) * g + cx] += mag;
          cell_count[static_cast<std::size_t>(cy) * g + cx] += 1;
        }
      }
      for (std::size_t c = 0; c < cell_sum.size(); ++c) out(slot++) = cell_sum[c] / cell_count[c];
    }
  }
  return out;
}

}  // namespace msplace
