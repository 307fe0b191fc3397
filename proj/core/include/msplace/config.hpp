#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "msplace/features.hpp"
#include "msplace/geo.hpp"
#include "msplace/image.hpp"
#include "msplace/model.hpp"
#include "msplace/solver.hpp"

namespace msplace {

/// Every tunable of the pipeline in one place. Serialized as `key = value`
/// lines; unknown keys are rejected. The text form is embedded in reports.
struct PipelineConfig {
  Hyperparams hyper;
  SolverConfig solver;
  DescriptorConfig descriptors;
  int frame_width = kStandardWidth;
  int frame_height = kStandardHeight;
  double radius_m = kDefaultRadiusM;
  double threshold = 0.5;
  int threshold_count = 201;
  std::uint64_t seed = 1;

  /// Applies one `key = value` assignment.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  std::string to_text() const;
  static PipelineConfig parse(const std::string& text);
  static PipelineConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

}  // namespace msplace
