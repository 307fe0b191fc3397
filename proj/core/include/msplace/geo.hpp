#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace msplace {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDefaultRadiusM = 50.0;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct GpsSample {
  double timestamp = 0.0;
  double lat = 0.0;
  double lon = 0.0;
};

/// Time-sorted GPS fixes: strictly increasing timestamps, at least two
/// samples, coordinates in range.
class GpsTrack {
 public:
  explicit GpsTrack(std::vector<GpsSample> samples);

  const std::vector<GpsSample>& samples() const { return samples_; }
  double start() const { return samples_.front().timestamp; }
  double end() const { return samples_.back().timestamp; }
  bool covers(double t) const { return t >= start() && t <= end(); }

 private:
  std::vector<GpsSample> samples_;
};

/// Piecewise-linear interpolation in raw lat/lon between the bracketing
/// fixes. Throws ExtrapolationError outside [start, end].
LatLon interpolate(const GpsTrack& track, double t);

/// Great-circle distance in metres (haversine, R = 6 371 000 m).
double haversine_m(const LatLon& a, const LatLon& b);

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct GroundTruth {
  /// queries x templates; true when the two positions are closer than radius_m.
  BoolMatrix same_place;
  double radius_m = kDefaultRadiusM;
};

GroundTruth build_ground_truth(const std::vector<LatLon>& query_positions,
                               const std::vector<LatLon>& template_positions,
                               double radius_m = kDefaultRadiusM);

/// Interpolates every timestamp on its track, then compares positions.
/// Throws ExtrapolationError naming the first offending query/template index.
GroundTruth build_ground_truth(const std::vector<double>& query_times,
                               const std::vector<double>& template_times,
                               const GpsTrack& query_track, const GpsTrack& template_track,
                               double radius_m = kDefaultRadiusM);

/// `timestamp,lat,lon` header, one fix per line.
GpsTrack read_gps_csv(const std::filesystem::path& path);
void write_gps_csv(const GpsTrack& track, const std::filesystem::path& path);

}  // namespace msplace
