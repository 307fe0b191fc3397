#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msplace/features.hpp"
#include "msplace/geo.hpp"

namespace msplace {

enum class Direction { forward, backward };

std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

/// One recorded traversal: a route driven in one season, time of day and
/// direction. Paths are relative to the manifest root unless absolute.
struct RunInfo {
  std::string route;
  std::string season;
  std::string time_of_day;
  Direction direction = Direction::forward;
  std::filesystem::path frames_dir;
  std::filesystem::path gps_csv;

  /// `<route>-<season>-<time_of_day>-<direction>`.
  std::string name() const;
};

/// Text manifest:
///   root <dir>                 (optional, relative to the manifest file)
///   run route=.. season=.. time=.. direction=forward|backward frames=<dir> gps=<csv>
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<RunInfo> runs;

  std::filesystem::path resolve(const std::filesystem::path& p) const;

  static DatasetManifest load(const std::filesystem::path& path);
  /// Writes the manifest; `root` is stored relative to the file when possible.
  void save(const std::filesystem::path& path) const;
};

/// Parsed `<image_id>_<timestamp_ms>_<intensity|disparity>.(png|pgm)`.
struct FrameFileName {
  std::string image_id;
  std::int64_t timestamp_ms = 0;
  FrameKind kind = FrameKind::intensity;
  std::string extension;
};

std::optional<FrameFileName> parse_frame_filename(const std::string& filename);
std::string frame_filename(const std::string& image_id, std::int64_t timestamp_ms, FrameKind kind,
                           const std::string& extension = ".pgm");

/// Inclusive frame index range `a..b` over a run's time-ordered frames.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;

  static FrameRange parse(const std::string& s);
};

struct IngestOptions {
  int width = kStandardWidth;
  int height = kStandardHeight;
  std::optional<FrameRange> frames;
};

/// Paired, downsampled frames of one run with their GPS track.
struct Run {
  RunInfo info;
  std::vector<FramePair> frames;
  GpsTrack track;
  /// Frames discarded because their timestamp lies outside the GPS span.
  std::size_t dropped_outside_gps = 0;

  std::vector<double> timestamps() const;
  std::vector<LatLon> positions() const;
};

/// Decodes, pairs, range-selects and downsamples one run. Throws
/// IngestionError naming the file (or image id) for unpaired frames,
/// undecodable images and unparsable GPS lines.
Run ingest_run(const DatasetManifest& manifest, std::size_t run_index, const IngestOptions& opts = {});
std::vector<Run> ingest(const DatasetManifest& manifest, const IngestOptions& opts = {});

/// Writes frames as PGM under `frames_dir` and the track as `gps_csv`.
void write_run(const Run& run, const std::filesystem::path& root);

}  // namespace msplace
