#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msplace/image.hpp"
#include "msplace/model.hpp"

namespace msplace {

struct HogConfig {
  int cell_size = 16;
  int bins = 9;
  int block = 2;  // cells per block side
  double clip = 0.2;
};

struct LbpConfig {
  int radius = 1;
  int neighbors = 8;
  bool uniform = true;
};

struct GistConfig {
  int orientations = 4;
  int scales = 2;
  int grid = 4;
};

/// Imported per-image vector block (e.g. CNN activations) for one sensor.
struct ExternalBlockSpec {
  std::string name;
  Index dim = 0;
  FrameKind sensor = FrameKind::intensity;

  friend bool operator==(const ExternalBlockSpec&, const ExternalBlockSpec&) = default;
};

struct DescriptorConfig {
  HogConfig hog;
  LbpConfig lbp;
  GistConfig gist;
  std::vector<ExternalBlockSpec> external;

  void validate() const;
};

/// HOG with unsigned orientations and hard bin assignment: a gradient at
/// angle a in [0, 180) degrees votes its magnitude into bin floor(a / (180 /
/// bins)), so a purely horizontal gradient (vertical edge) lands in bin 0 and
/// a purely vertical one in bin bins/2. Gradients are central differences
/// with edge replication; cells that do not fit completely are dropped.
/// Blocks of block x block cells slide by one cell; each block is L2-Hys
/// normalized (L2, clip, L2). Block layout: cells row-major, then bins.
Index hog_length(const HogConfig& cfg, int width, int height);
Vector hog(const ImageFrame& frame, const HogConfig& cfg = {});

/// Uniform LBP histogram over interior pixels. Neighbours at the eight
/// square-ring offsets of the given radius, clockwise from the top-left;
/// bit i is set when neighbour i >= centre. Uniform codes (at most two 0/1
/// transitions circularly) get bins 0..57 in increasing code order; all
/// other codes share bin 58. Non-uniform mode uses 256 raw-code bins. The
/// histogram is L1 normalized.
Index lbp_length(const LbpConfig& cfg);
Vector lbp(const ImageFrame& frame, const LbpConfig& cfg = {});
/// Bin index for an 8-bit code under the uniform mapping.
int lbp_uniform_bin(unsigned code);

/// Gabor energy on a grid. Each (scale, orientation) filter is a Gaussian
/// bump in the frequency domain centred on radial frequency 0.25 / 2^scale
/// cycles/pixel at angle pi * orientation / orientations, with zero DC gain.
/// Output entries are mean response magnitudes per grid cell, ordered
/// scale, orientation, cell row, cell column.
Index gist_length(const GistConfig& cfg);
Vector gist(const ImageFrame& frame, const GistConfig& cfg = {});
/// Centre frequency (cycles/pixel) of the filters at `scale`.
double gist_center_frequency(int scale);
/// Frequency response of filter (scale, orientation) at (u, v) cycles/pixel.
double gist_filter_response(const GistConfig& cfg, int scale, int orientation, double u, double v);

/// An intensity frame and the disparity frame recorded with it.
struct FramePair {
  ImageFrame intensity;
  ImageFrame disparity;
};

/// Vectors for one external block, keyed by image id.
struct ExternalFeatures {
  ExternalBlockSpec spec;
  std::map<std::string, Vector> rows;
};

/// Reads `external <name> <dim> <sensor>` followed by
/// `<image_id> v1 ... v_dim` lines.
ExternalFeatures read_external_features(const std::filesystem::path& path);
void write_external_features(const ExternalFeatures& ext, const std::filesystem::path& path);

/// Layout {intensity: [gist, hog, lbp, ext...], disparity: [gist, hog, lbp, ext...]}
/// for frames of the given size.
ModalityLayout descriptor_layout(const DescriptorConfig& cfg, int width, int height);

/// Per-feature-block z-score statistics (one mean and one standard deviation
/// per block, pooled over all entries of the block across the training
/// images). Blocks whose standard deviation vanishes map to zeros.
class BlockNormalization {
 public:
  BlockNormalization() = default;
  BlockNormalization(std::vector<double> mean, std::vector<double> stddev);

  static BlockNormalization fit(const FeatureMatrix& raw);
  FeatureMatrix apply(const FeatureMatrix& raw) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

  friend bool operator==(const BlockNormalization&, const BlockNormalization&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

/// Raw (un-normalized) descriptors, one column per pair, in input order.
/// Every pair needs both frames at a common size; external blocks must cover
/// every image id. Extraction runs in parallel over images; the result does
/// not depend on the thread count.
FeatureMatrix extract_raw(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                          const std::vector<ExternalFeatures>& external = {});

struct Extraction {
  FeatureMatrix features;
  BlockNormalization normalization;
};

/// Training-time extraction: raw descriptors, statistics fitted on them, and
/// the normalized matrix.
Extraction extract_all(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                       const std::vector<ExternalFeatures>& external = {});

/// Query-time extraction with frozen statistics.
FeatureMatrix extract_normalized(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                                 const BlockNormalization& norm,
                                 const std::vector<ExternalFeatures>& external = {});

}  // namespace msplace
