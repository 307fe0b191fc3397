#include "msplace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "msplace/error.hpp"
#include "msplace/random.hpp"

namespace fs = std::filesystem;

namespace msplace {

std::string to_string(DisparityProfile p) {
  return p == DisparityProfile::noise_only ? "noise_only" : "structured";
}

DisparityProfile parse_disparity_profile(const std::string& s) {
  if (s == "noise_only") return DisparityProfile::noise_only;
  if (s == "structured") return DisparityProfile::structured;
  throw ValidationError("unknown disparity profile '" + s + "' (expected noise_only|structured)");
}

std::vector<ScenarioSpec> default_scenarios(int count) {
  static const std::vector<ScenarioSpec> table = {
      {"summer", "morning", 12.0, 1.00, 3.0, 10.0, 15.0},
      {"summer", "evening", -28.0, 0.80, 7.0, -30.0, 25.0},
      {"fall", "evening", -12.0, 0.62, 12.0, 22.0, 30.0},
      {"winter", "morning", 30.0, 1.15, 5.0, -12.0, 20.0},
      {"spring", "morning", 5.0, 0.90, 9.0, 35.0, 25.0},
      {"spring", "evening", -20.0, 0.72, 4.0, -20.0, 20.0},
      {"winter", "evening", -35.0, 0.70, 10.0, 0.0, 30.0},
      {"fall", "morning", 18.0, 1.05, 6.0, -35.0, 15.0},
  };
  if (count < 1 || count > static_cast<int>(table.size())) {
    throw ValidationError("scenario count must be in [1, " + std::to_string(table.size()) + "]");
  }
  return {table.begin(), table.begin() + count};
}

void SynthOptions::validate() const {
  if (n_places < 2) throw ValidationError("synthetic dataset needs at least 2 places");
  if (n_scenarios < 2) throw ValidationError("synthetic dataset needs at least 2 scenarios");
  default_scenarios(n_scenarios);
  if (width < 16 || height < 16) throw ValidationError("synthetic frames must be at least 16x16");
  if (!(place_spacing_m > 0.0) || !(speed_mps > 0.0)) {
    throw ValidationError("place spacing and speed must be positive");
  }
  if (!(position_jitter_m >= 0.0) || position_jitter_m * 2.0 >= place_spacing_m) {
    throw ValidationError("position jitter must be in [0, spacing/2)");
  }
  if (!(mirror_symmetry >= 0.0 && mirror_symmetry <= 1.0)) {
    throw ValidationError("mirror symmetry must be in [0, 1]");
  }
  if (route.empty() || route.find_first_of(" \t=") != std::string::npos) {
    throw ValidationError("route name must be non-empty without spaces or '='");
  }
}

namespace {

constexpr double kLat0 = 39.7555;
constexpr double kLon0 = -105.2211;
constexpr double kMetresPerDegree = kEarthRadiusM * std::numbers::pi / 180.0;

/// Float canvas, row-major.
struct Canvas {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  Canvas(int width, int height, double fill) : w(width), h(height), v(static_cast<std::size_t>(width) * height, fill) {}
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }

  void rect(int x0, int y0, int x1, int y1, double value) {
    y0 = std::clamp(y0, 0, h);
    y1 = std::clamp(y1, 0, h);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) at(((x % w) + w) % w, y) = value;
    }
  }
};

/// Place geometry rendered into an intensity layer and a nearness layer.
struct Scene {
  Canvas intensity;
  Canvas depth;
};

Scene random_scene(Rng& rng, int w, int h) {
  const int horizon = static_cast<int>(h * rng.uniform(0.35, 0.55));
  const double sky = rng.uniform(150.0, 220.0);
  const double ground = rng.uniform(50.0, 110.0);
  Scene s{Canvas(w, h, 0.0), Canvas(w, h, 0.0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (y < horizon) {
        s.intensity.at(x, y) = sky - 20.0 * y / horizon;
      } else {
        s.intensity.at(x, y) = ground + 25.0 * (y - horizon) / std::max(1, h - horizon);
        s.depth.at(x, y) = 40.0 + 160.0 * (y - horizon) / std::max(1, h - horizon);
      }
    }
  }
  // Oriented grating patch.
  {
    const int px = rng.uniform_int(0, w - 1);
    const int pw = rng.uniform_int(w / 10, w / 4);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double freq = rng.uniform(0.08, 0.3);
    const double amp = rng.uniform(25.0, 55.0);
    for (int y = horizon; y < h; ++y) {
      for (int dx = 0; dx < pw; ++dx) {
        const int x = (px + dx) % w;
        const double phase = 2.0 * std::numbers::pi * freq * (dx * std::cos(theta) + y * std::sin(theta));
        s.intensity.at(x, y) += amp * std::sin(phase);
      }
    }
  }
  const int buildings = rng.uniform_int(5, 9);
  for (int b = 0; b < buildings; ++b) {
    const int x0 = rng.uniform_int(0, w - 1);
    const int bw = rng.uniform_int(w / 25, w / 6);
    const int top = rng.uniform_int(2, std::max(3, horizon - 4));
    const int bottom = std::min(h, horizon + rng.uniform_int(0, h / 6));
    const double value = rng.uniform(30.0, 210.0);
    const double near = rng.uniform(60.0, 240.0);
    s.intensity.rect(x0, top, x0 + bw, bottom, value);
    s.depth.rect(x0, top, x0 + bw, bottom, near);
    if (rng.bernoulli(0.6)) {
      const int sx = rng.uniform_int(10, 20);
      const int sy = rng.uniform_int(10, 18);
      const double win = value + (value > 120.0 ? -1.0 : 1.0) * rng.uniform(35.0, 70.0);
      for (int y = top + 3; y + 6 < bottom; y += sy) {
        for (int x = x0 + 3; x + 5 < x0 + bw; x += sx) s.intensity.rect(x, y, x + 5, y + 7, win);
      }
    }
  }
  const int poles = rng.uniform_int(3, 10);
  for (int k = 0; k < poles; ++k) {
    const int x0 = rng.uniform_int(0, w - 1);
    const int pw = rng.uniform_int(2, 7);
    const int top = rng.uniform_int(0, horizon);
    const double value = rng.uniform(10.0, 70.0);
    s.intensity.rect(x0, top, x0 + pw, std::min(h, horizon + h / 8), value);
    s.depth.rect(x0, top, x0 + pw, std::min(h, horizon + h / 8), rng.uniform(150.0, 250.0));
  }
  return s;
}

/// Left half mirrored onto the right half.
Canvas mirrored(const Canvas& c) {
  Canvas out = c;
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w / 2; ++x) out.at(c.w - 1 - x, y) = c.at(x, y);
  }
  return out;
}

Canvas blend(const Canvas& a, const Canvas& b, double wa) {
  Canvas out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = wa * a.v[i] + (1.0 - wa) * b.v[i];
  return out;
}

Scene place_scene(std::uint64_t seed, std::size_t place, const SynthOptions& o) {
  Rng rng = Rng::derived(seed, 1000 + place);
  const Scene sym = random_scene(rng, o.width, o.height);
  const Scene asym = random_scene(rng, o.width, o.height);
  return {blend(mirrored(sym.intensity), asym.intensity, o.mirror_symmetry),
          blend(mirrored(sym.depth), asym.depth, o.mirror_symmetry)};
}

ImageFrame to_frame(const Canvas& c, FrameKind kind, const std::string& id, double t) {
  ImageFrame f;
  f.width = c.w;
  f.height = c.h;
  f.kind = kind;
  f.image_id = id;
  f.timestamp = t;
  f.pixels.resize(c.v.size());
  for (std::size_t i = 0; i < c.v.size(); ++i) {
    f.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(c.v[i]), 0L, 255L));
  }
  return f;
}

/// Circular horizontal shift, then optional mirror.
Canvas view(const Canvas& c, int shift, bool flip) {
  Canvas out(c.w, c.h, 0.0);
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) {
      const int src = (((x - shift) % c.w) + c.w) % c.w;
      out.at(flip ? c.w - 1 - x : x, y) = c.at(src, y);
    }
  }
  return out;
}

/// Seasonal surface texture (foliage, snow, wet road): fixed per scenario,
/// independent of place.
Canvas scenario_overlay(std::uint64_t seed, std::size_t scenario, int w, int h) {
  Rng rng = Rng::derived(seed, 5000 + scenario);
  Canvas out(w, h, 0.0);
  const int cell = rng.uniform_int(3, 8);
  for (int y0 = 0; y0 < h; y0 += cell) {
    for (int x0 = 0; x0 < w; x0 += cell) out.rect(x0, y0, x0 + cell, y0 + cell, rng.normal());
  }
  return out;
}

Canvas render_intensity(const Canvas& place, const Canvas& overlay, const ScenarioSpec& sc, Rng& rng) {
  Canvas out = place;
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      const double ramp = sc.shading * (2.0 * x / (out.w - 1) - 1.0);
      double& p = out.at(x, y);
      p = sc.contrast * (p - 128.0) + 128.0 + sc.brightness + ramp + sc.texture * overlay.at(x, y) +
          rng.normal(0.0, sc.noise_sigma);
    }
  }
  return out;
}

/// Static part of every disparity frame: ground plane and vehicle body.
Canvas sensor_pattern(std::uint64_t seed, int w, int h) {
  Rng rng = Rng::derived(seed, 9000);
  Canvas out(w, h, 0.0);
  const int horizon = h / 2;
  for (int y = horizon; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = 40.0 + 200.0 * (y - horizon) / (h - horizon);
  }
  const int parts = rng.uniform_int(4, 8);
  for (int k = 0; k < parts; ++k) {
    const int x0 = rng.uniform_int(0, w - 1);
    const int y0 = rng.uniform_int(h / 3, h - 1);
    out.rect(x0, y0, x0 + rng.uniform_int(w / 20, w / 5), h, rng.uniform(120.0, 250.0));
  }
  return out;
}

/// Sensor pattern plus frame-specific blobs, speckle and dropout, all drawn
/// from one distribution regardless of place or scenario.
Canvas render_noise_disparity(const Canvas& pattern, const SynthOptions& o, Rng& rng) {
  const int w = pattern.w;
  const int h = pattern.h;
  Canvas out = pattern;
  const int blobs = rng.uniform_int(4, 24);
  for (int b = 0; b < blobs; ++b) {
    const double cx = rng.uniform(0.0, w);
    const double cy = rng.uniform(0.0, h);
    const double sx = rng.uniform(6.0, 80.0);
    const double sy = rng.uniform(4.0, 40.0);
    const double amp = o.disparity_noise * rng.uniform(-1.0, 1.0);
    const int x0 = std::max(0, static_cast<int>(cx - 3 * sx));
    const int x1 = std::min(w, static_cast<int>(cx + 3 * sx) + 1);
    const int y0 = std::max(0, static_cast<int>(cy - 3 * sy));
    const int y1 = std::min(h, static_cast<int>(cy + 3 * sy) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double dx = (x - cx) / sx;
        const double dy = (y - cy) / sy;
        out.at(x, y) += amp * std::exp(-0.5 * (dx * dx + dy * dy));
      }
    }
  }
  const double sigma = o.disparity_noise * rng.uniform(0.05, 1.0);
  for (double& p : out.v) p += rng.normal(0.0, sigma);
  const int holes = rng.uniform_int(0, 3);
  for (int k = 0; k < holes; ++k) {
    const int x0 = rng.uniform_int(0, w - 1);
    const int y0 = rng.uniform_int(0, h - 1);
    out.rect(x0, y0, x0 + rng.uniform_int(4, 60), y0 + rng.uniform_int(4, 30), 0.0);
  }
  return out;
}

Canvas render_structured_disparity(const Canvas& depth, Rng& rng) {
  Canvas out = depth;
  for (double& p : out.v) p += rng.normal(0.0, 6.0);
  return out;
}

LatLon loop_position(double s, double circumference) {
  const double radius = circumference / (2.0 * std::numbers::pi);
  const double phi = s / radius;
  const double east = radius * std::sin(phi);
  const double north = radius * (1.0 - std::cos(phi));
  const double lat = kLat0 + north / kMetresPerDegree;
  const double lon = kLon0 + east / (kMetresPerDegree * std::cos(kLat0 * std::numbers::pi / 180.0));
  return {lat, lon};
}

}  // namespace

SynthDataset generate_synthetic(const SynthOptions& o) {
  o.validate();
  const auto scenarios = default_scenarios(o.n_scenarios);
  const auto n = static_cast<std::size_t>(o.n_places);
  const double circumference = o.place_spacing_m * static_cast<double>(n);

  std::vector<Scene> places;
  places.reserve(n);
  for (std::size_t k = 0; k < n; ++k) places.push_back(place_scene(o.seed, k, o));

  const Canvas pattern = sensor_pattern(o.seed, o.width, o.height);
  std::vector<Canvas> overlays;
  for (std::size_t si = 0; si < scenarios.size(); ++si) overlays.push_back(scenario_overlay(o.seed, si, o.width, o.height));

  SynthDataset out;
  const int directions = o.direction_flip ? 2 : 1;
  for (int d = 0; d < directions; ++d) {
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
      const auto& sc = scenarios[si];
      const bool backward = d == 1;
      const std::size_t run_tag = static_cast<std::size_t>(d) * scenarios.size() + si;
      Rng rng = Rng::derived(o.seed, 1 + run_tag);

      Run run{RunInfo{}, {}, GpsTrack({{0.0, kLat0, kLon0}, {1.0, kLat0, kLon0}}), 0};
      run.info.route = o.route;
      run.info.season = sc.season;
      run.info.time_of_day = sc.time_of_day;
      run.info.direction = backward ? Direction::backward : Direction::forward;
      run.info.frames_dir = fs::path(run.info.name()) / "frames";
      run.info.gps_csv = fs::path(run.info.name()) / "gps.csv";

      // Arc length runs from -spacing/2 to (n - 1/2) * spacing, reversed when backward.
      const double t0 = 1.0e6 + 1.0e4 * static_cast<double>(run_tag);
      const double length = circumference;
      const double duration = length / o.speed_mps;
      auto arc_at = [&](double t) {
        const double travelled = o.speed_mps * (t - t0);
        return backward ? (static_cast<double>(n) - 0.5) * o.place_spacing_m - travelled
                        : -0.5 * o.place_spacing_m + travelled;
      };

      std::vector<GpsSample> fixes;
      const int seconds = static_cast<int>(std::ceil(duration));
      for (int k = 0; k <= seconds; ++k) {
        const double t = t0 + k;
        const LatLon p = loop_position(arc_at(t), circumference);
        fixes.push_back({t, p.lat, p.lon});
      }
      run.track = GpsTrack(std::move(fixes));

      const std::string prefix = sc.season + "-" + sc.time_of_day + (backward ? "-b-" : "-f-");
      std::vector<std::size_t> place_ids;
      for (std::size_t v = 0; v < n; ++v) {
        const std::size_t place = backward ? n - 1 - v : v;
        const double s = static_cast<double>(place) * o.place_spacing_m +
                         rng.uniform(-o.position_jitter_m, o.position_jitter_m);
        const double travelled = backward ? (static_cast<double>(n) - 0.5) * o.place_spacing_m - s
                                          : s + 0.5 * o.place_spacing_m;
        const double t = std::round((t0 + travelled / o.speed_mps) * 1000.0) / 1000.0;
        char idx[32];
        std::snprintf(idx, sizeof idx, "%03zu", v);
        const std::string id = prefix + idx;

        const int shift = rng.uniform_int(-4, 4);
        const Canvas base = view(places[place].intensity, shift, backward);
        const Canvas inten = render_intensity(base, overlays[si], sc, rng);
        const Canvas disp = o.disparity == DisparityProfile::noise_only
                                ? render_noise_disparity(pattern, o, rng)
                                : render_structured_disparity(view(places[place].depth, shift, backward), rng);
        run.frames.push_back({to_frame(inten, FrameKind::intensity, id, t), to_frame(disp, FrameKind::disparity, id, t)});
        place_ids.push_back(place);
      }
      out.runs.push_back(std::move(run));
      out.place_of_frame.push_back(std::move(place_ids));
    }
  }
  return out;
}

DatasetManifest write_synthetic(const SynthDataset& data, const fs::path& out_dir) {
  DatasetManifest m;
  m.root = out_dir;
  for (const auto& run : data.runs) {
    write_run(run, out_dir);
    m.runs.push_back(run.info);
  }
  m.save(out_dir / "manifest.txt");
  return m;
}

}  // namespace msplace
