#include "msplace/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"

namespace msplace {

namespace fs = std::filesystem;

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

Direction parse_direction(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  throw ValidationError("unknown direction '" + s + "' (expected forward|backward)");
}

std::string RunInfo::name() const {
  return route + "-" + season + "-" + time_of_day + "-" + to_string(direction);
}

fs::path DatasetManifest::resolve(const fs::path& p) const { return p.is_absolute() ? p : root / p; }

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = text::split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (tok[0] == "root") {
      if (tok.size() != 2) throw IngestionError(where + ": expected 'root <dir>'");
      const fs::path r(tok[1]);
      m.root = r.is_absolute() ? r : path.parent_path() / r;
    } else if (tok[0] == "run") {
      std::map<std::string, std::string> kv;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string::npos) throw IngestionError(where + ": expected key=value, got '" + tok[i] + "'");
        kv[tok[i].substr(0, eq)] = tok[i].substr(eq + 1);
      }
      for (const char* key : {"route", "season", "time", "direction", "frames", "gps"}) {
        if (!kv.contains(key)) throw IngestionError(where + ": run is missing '" + key + "'");
      }
      RunInfo r;
      r.route = kv["route"];
      r.season = kv["season"];
      r.time_of_day = kv["time"];
      try {
        r.direction = parse_direction(kv["direction"]);
      } catch (const ValidationError& e) {
        throw IngestionError(where + ": " + e.what());
      }
      r.frames_dir = kv["frames"];
      r.gps_csv = kv["gps"];
      m.runs.push_back(std::move(r));
    } else {
      throw IngestionError(where + ": unknown manifest directive '" + tok[0] + "'");
    }
  }
  if (m.runs.empty()) throw IngestionError(path.string() + ": manifest lists no runs");
  return m;
}

void DatasetManifest::save(const fs::path& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  std::error_code ec;
  fs::path rel = fs::relative(root, path.parent_path().empty() ? fs::path(".") : path.parent_path(), ec);
  if (ec || rel.empty()) rel = root;
  os << "# msplace dataset manifest\n";
  os << "root " << rel.generic_string() << '\n';
  for (const auto& r : runs) {
    os << "run route=" << r.route << " season=" << r.season << " time=" << r.time_of_day
       << " direction=" << to_string(r.direction) << " frames=" << r.frames_dir.generic_string()
       << " gps=" << r.gps_csv.generic_string() << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

std::optional<FrameFileName> parse_frame_filename(const std::string& filename) {
  const auto dot = filename.rfind('.');
  if (dot == std::string::npos) return std::nullopt;
  FrameFileName out;
  out.extension = filename.substr(dot);
  if (out.extension != ".pgm" && out.extension != ".png") return std::nullopt;
  const std::string stem = filename.substr(0, dot);
  const auto kind_sep = stem.rfind('_');
  if (kind_sep == std::string::npos) return std::nullopt;
  const std::string kind = stem.substr(kind_sep + 1);
  if (kind == "intensity") out.kind = FrameKind::intensity;
  else if (kind == "disparity") out.kind = FrameKind::disparity;
  else return std::nullopt;
  const auto ts_sep = stem.rfind('_', kind_sep - 1);
  if (ts_sep == std::string::npos || ts_sep == 0 || kind_sep == 0) return std::nullopt;
  const std::string ts = stem.substr(ts_sep + 1, kind_sep - ts_sep - 1);
  if (ts.empty() || !std::all_of(ts.begin(), ts.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  out.timestamp_ms = std::stoll(ts);
  out.image_id = stem.substr(0, ts_sep);
  return out;
}

std::string frame_filename(const std::string& image_id, std::int64_t timestamp_ms, FrameKind kind,
                           const std::string& extension) {
  return image_id + "_" + std::to_string(timestamp_ms) + "_" + to_string(kind) + extension;
}

FrameRange FrameRange::parse(const std::string& s) {
  const auto sep = s.find("..");
  if (sep == std::string::npos) throw ValidationError("frame range '" + s + "' must look like a..b");
  FrameRange r;
  r.first = static_cast<std::size_t>(text::to_u64(s.substr(0, sep), "frame range start"));
  r.last = static_cast<std::size_t>(text::to_u64(s.substr(sep + 2), "frame range end"));
  if (r.last < r.first) throw ValidationError("frame range '" + s + "' is empty");
  return r;
}

std::vector<double> Run::timestamps() const {
  std::vector<double> t;
  t.reserve(frames.size());
  for (const auto& f : frames) t.push_back(f.intensity.timestamp);
  return t;
}

std::vector<LatLon> Run::positions() const {
  std::vector<LatLon> p;
  p.reserve(frames.size());
  for (const auto& f : frames) p.push_back(interpolate(track, f.intensity.timestamp));
  return p;
}

namespace {

struct PendingFrame {
  std::int64_t timestamp_ms = 0;
  fs::path intensity;
  fs::path disparity;
};

ImageFrame load_frame(const fs::path& path, const std::string& id, double t, FrameKind kind,
                      const IngestOptions& opts) {
  ImageFrame f;
  try {
    f = read_image(path);
  } catch (const IoError& e) {
    throw IngestionError(e.what());
  }
  f.image_id = id;
  f.timestamp = t;
  f.kind = kind;
  if (f.width == opts.width && f.height == opts.height) return f;
  try {
    return downsample(f, opts.width, opts.height);
  } catch (const ValidationError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

}  // namespace

Run ingest_run(const DatasetManifest& manifest, std::size_t run_index, const IngestOptions& opts) {
  if (run_index >= manifest.runs.size()) {
    throw ValidationError("run index " + std::to_string(run_index) + " out of range");
  }
  const RunInfo& info = manifest.runs[run_index];
  const fs::path frames_dir = manifest.resolve(info.frames_dir);
  const fs::path gps_path = manifest.resolve(info.gps_csv);
  if (!fs::is_directory(frames_dir)) throw IngestionError("frames directory " + frames_dir.string() + " does not exist");
  if (!fs::exists(gps_path)) throw IngestionError("GPS file " + gps_path.string() + " does not exist");
  GpsTrack track = read_gps_csv(gps_path);

  std::map<std::string, PendingFrame> by_id;
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(frames_dir)) {
    if (e.is_regular_file()) entries.push_back(e.path());
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& path : entries) {
    const auto parsed = parse_frame_filename(path.filename().string());
    if (!parsed) continue;
    auto& slot = by_id[parsed->image_id];
    if (!slot.intensity.empty() || !slot.disparity.empty()) {
      if (slot.timestamp_ms != parsed->timestamp_ms) {
        throw IngestionError("image '" + parsed->image_id + "' has frames with different timestamps");
      }
    }
    slot.timestamp_ms = parsed->timestamp_ms;
    fs::path& target = parsed->kind == FrameKind::intensity ? slot.intensity : slot.disparity;
    if (!target.empty()) throw IngestionError("image '" + parsed->image_id + "' has duplicate " + to_string(parsed->kind) + " frames");
    target = path;
  }
  if (by_id.empty()) throw IngestionError("no frame files found in " + frames_dir.string());

  std::vector<std::pair<std::string, PendingFrame>> ordered(by_id.begin(), by_id.end());
  for (const auto& [id, pf] : ordered) {
    if (pf.intensity.empty()) throw IngestionError("image '" + id + "' has no intensity frame");
    if (pf.disparity.empty()) throw IngestionError("image '" + id + "' has no disparity frame");
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.second.timestamp_ms < b.second.timestamp_ms;
  });
  std::size_t first = 0;
  std::size_t last = ordered.size() - 1;
  if (opts.frames) {
    first = opts.frames->first;
    last = std::min(opts.frames->last, last);
    if (first > last) {
      throw ValidationError("frame range starts past the " + std::to_string(ordered.size()) +
                            " frames of run " + info.name());
    }
  }

  Run run{info, {}, track, 0};
  for (std::size_t i = first; i <= last; ++i) {
    const auto& [id, pf] = ordered[i];
    const double t = static_cast<double>(pf.timestamp_ms) / 1000.0;
    if (!track.covers(t)) {
      ++run.dropped_outside_gps;
      continue;
    }
    FramePair pair{load_frame(pf.intensity, id, t, FrameKind::intensity, opts),
                   load_frame(pf.disparity, id, t, FrameKind::disparity, opts)};
    run.frames.push_back(std::move(pair));
  }
  return run;
}

std::vector<Run> ingest(const DatasetManifest& manifest, const IngestOptions& opts) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < manifest.runs.size(); ++i) runs.push_back(ingest_run(manifest, i, opts));
  return runs;
}

void write_run(const Run& run, const fs::path& root) {
  const fs::path dir = run.info.frames_dir.is_absolute() ? run.info.frames_dir : root / run.info.frames_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& fp : run.frames) {
    const auto ms = static_cast<std::int64_t>(std::llround(fp.intensity.timestamp * 1000.0));
    write_pgm(fp.intensity, dir / frame_filename(fp.intensity.image_id, ms, FrameKind::intensity));
    write_pgm(fp.disparity, dir / frame_filename(fp.disparity.image_id, ms, FrameKind::disparity));
  }
  const fs::path gps = run.info.gps_csv.is_absolute() ? run.info.gps_csv : root / run.info.gps_csv;
  if (gps.has_parent_path()) fs::create_directories(gps.parent_path(), ec);
  write_gps_csv(run.track, gps);
}

}  // namespace msplace
