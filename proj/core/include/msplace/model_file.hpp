#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "msplace/config.hpp"
#include "msplace/features.hpp"
#include "msplace/matching.hpp"
#include "msplace/model.hpp"

namespace msplace {

inline constexpr int kModelFormatVersion = 1;

/// A trained model: everything needed to extract, normalize and score new
/// frames exactly as at training time.
///
/// Text format, one item per line:
///   version 1
///   scenarios <c> <name>...
///   config <k>            followed by k `key = value` lines
///   external <name> <dim> <sensor>   (zero or more)
///   layout <k>            followed by k layout lines
///   normalization <blocks>   followed by one `<mean> <std>` line per block
///   weights <p> <c>       followed by p rows of c values
///   end
/// Reals are written in shortest round-trip form, so save/load is lossless.
struct ModelFile {
  PipelineConfig config;
  std::vector<std::string> scenario_names;
  BlockNormalization normalization;
  WeightMatrix weights;

  const ModalityLayout& layout() const { return weights.layout(); }
  ModalityWeights modality_weights() const { return extract_weights(weights); }

  /// Throws ModelError unless the layout matches the descriptor config and
  /// the normalization has one entry per block.
  void validate() const;
  /// Throws ModelError when `features` were not produced with this model's
  /// descriptor layout.
  void check_features(const FeatureMatrix& features) const;

  std::string to_text() const;
  static ModelFile parse(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ModelFile load(const std::filesystem::path& path);
};

}  // namespace msplace
