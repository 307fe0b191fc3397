#include "msplace/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

GpsTrack::GpsTrack(std::vector<GpsSample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw ValidationError("a GPS track needs at least two samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.timestamp) || !std::isfinite(s.lat) || !std::isfinite(s.lon)) {
      throw ValidationError("GPS sample " + std::to_string(i) + " is not finite");
    }
    if (s.lat < -90.0 || s.lat > 90.0 || s.lon < -180.0 || s.lon > 180.0) {
      throw ValidationError("GPS sample " + std::to_string(i) + " has out-of-range coordinates");
    }
    if (i > 0 && !(s.timestamp > samples_[i - 1].timestamp)) {
      throw ValidationError("GPS timestamps must be strictly increasing (sample " +
                            std::to_string(i) + ")");
    }
  }
}

LatLon interpolate(const GpsTrack& track, double t) {
  if (!track.covers(t)) {
    throw ExtrapolationError("time " + text::decimal(t) + " is outside the GPS track span [" +
                             text::decimal(track.start()) + ", " + text::decimal(track.end()) + "]");
  }
  const auto& s = track.samples();
  auto hi = std::lower_bound(s.begin(), s.end(), t,
                             [](const GpsSample& g, double v) { return g.timestamp < v; });
  if (hi->timestamp == t) return {hi->lat, hi->lon};
  auto lo = hi - 1;
  const double f = (t - lo->timestamp) / (hi->timestamp - lo->timestamp);
  return {lo->lat + f * (hi->lat - lo->lat), lo->lon + f * (hi->lon - lo->lon)};
}

double haversine_m(const LatLon& a, const LatLon& b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

GroundTruth build_ground_truth(const std::vector<LatLon>& query_positions,
                               const std::vector<LatLon>& template_positions, double radius_m) {
  if (!(radius_m > 0.0)) throw ValidationError("ground-truth radius must be > 0");
  GroundTruth gt;
  gt.radius_m = radius_m;
  gt.same_place.resize(static_cast<Eigen::Index>(query_positions.size()),
                       static_cast<Eigen::Index>(template_positions.size()));
  for (std::size_t i = 0; i < query_positions.size(); ++i) {
    for (std::size_t j = 0; j < template_positions.size(); ++j) {
      gt.same_place(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          haversine_m(query_positions[i], template_positions[j]) < radius_m;
    }
  }
  return gt;
}

namespace {

std::vector<LatLon> positions(const std::vector<double>& times, const GpsTrack& track,
                              const char* role) {
  std::vector<LatLon> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    try {
      out.push_back(interpolate(track, times[i]));
    } catch (const ExtrapolationError& e) {
      throw ExtrapolationError(std::string(role) + " " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

GroundTruth build_ground_truth(const std::vector<double>& query_times,
                               const std::vector<double>& template_times,
                               const GpsTrack& query_track, const GpsTrack& template_track,
                               double radius_m) {
  return build_ground_truth(positions(query_times, query_track, "query"),
                            positions(template_times, template_track, "template"), radius_m);
}

GpsTrack read_gps_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || text::trim(line) != "timestamp,lat,lon") {
    throw IngestionError(path.string() + ":1: expected header 'timestamp,lat,lon'");
  }
  std::vector<GpsSample> samples;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() != 3) throw IngestionError(where + ": expected 3 fields");
    try {
      samples.push_back({text::to_double(f[0], "timestamp"), text::to_double(f[1], "lat"),
                         text::to_double(f[2], "lon")});
    } catch (const ValidationError& e) {
      throw IngestionError(where + ": " + e.what());
    }
  }
  try {
    return GpsTrack(std::move(samples));
  } catch (const ValidationError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_gps_csv(const GpsTrack& track, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "timestamp,lat,lon\n";
  // Shortest round-trip form keeps write/read lossless.
  for (const auto& s : track.samples()) {
    os << text::exact(s.timestamp) << ',' << text::exact(s.lat) << ',' << text::exact(s.lon) << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace msplace
