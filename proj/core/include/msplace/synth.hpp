#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msplace/dataset.hpp"

namespace msplace {

enum class DisparityProfile {
  /// Disparity frames carry random content unrelated to place or scenario.
  noise_only,
  /// Disparity frames render the place geometry plus mild noise.
  structured,
};

std::string to_string(DisparityProfile p);
DisparityProfile parse_disparity_profile(const std::string& s);

/// Appearance of one recording condition.
struct ScenarioSpec {
  std::string season;
  std::string time_of_day;
  double brightness = 0.0;   // additive offset
  double contrast = 1.0;     // gain about mid-grey
  double noise_sigma = 0.0;  // additive Gaussian noise
  double shading = 0.0;      // amplitude of a horizontal illumination ramp
  double texture = 0.0;      // amplitude of the scenario's surface texture
};

/// The first three are summer-morning, summer-evening and fall-evening.
std::vector<ScenarioSpec> default_scenarios(int count);

struct SynthOptions {
  std::uint64_t seed = 1;
  int n_places = 20;
  int n_scenarios = 3;
  DisparityProfile disparity = DisparityProfile::noise_only;
  /// Also emit, per scenario, a backward traversal with mirrored frames.
  bool direction_flip = false;
  int width = kStandardWidth;
  int height = kStandardHeight;
  double place_spacing_m = 100.0;
  double speed_mps = 10.0;
  double position_jitter_m = 5.0;
  /// Scale of the frame-specific disparity content.
  double disparity_noise = 12.0;
  /// Share of each place panorama that is left-right symmetric.
  double mirror_symmetry = 0.7;
  std::string route = "loop";

  void validate() const;
};

struct SynthDataset {
  /// Forward runs in scenario order, then (with direction_flip) backward runs.
  std::vector<Run> runs;
  /// Place index of every frame, per run.
  std::vector<std::vector<std::size_t>> place_of_frame;
};

/// Deterministic desk-scale stand-in for a multi-season, bidirectional
/// recording campaign: each place has a fixed texture signature, each
/// scenario perturbs brightness, contrast, shading and noise, and the
/// vehicle drives a circular loop logged by 1 Hz GPS.
SynthDataset generate_synthetic(const SynthOptions& opts);

/// Writes frames, GPS tracks and `manifest.txt` under out_dir.
DatasetManifest write_synthetic(const SynthDataset& data, const std::filesystem::path& out_dir);

}  // namespace msplace
