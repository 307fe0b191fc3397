#include "msplace/features.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "msplace/error.hpp"
#include "msplace/text.hpp"
#include "parallel.hpp"

namespace msplace {

void DescriptorConfig::validate() const {
  if (hog.cell_size < 2) throw ValidationError("hog cell_size must be >= 2");
  if (hog.bins < 1) throw ValidationError("hog bins must be >= 1");
  if (hog.block < 1) throw ValidationError("hog block must be >= 1");
  if (!(hog.clip > 0.0)) throw ValidationError("hog clip must be > 0");
  if (lbp.radius < 1) throw ValidationError("lbp radius must be >= 1");
  if (lbp.neighbors != 8) throw ValidationError("lbp supports exactly 8 neighbours");
  if (gist.orientations < 1 || gist.scales < 1 || gist.grid < 1) {
    throw ValidationError("gist orientations, scales and grid must be >= 1");
  }
  for (const auto& e : external) {
    if (e.name.empty() || e.dim < 1) throw ValidationError("external block needs a name and dim >= 1");
    if (e.name == "gist" || e.name == "hog" || e.name == "lbp") {
      throw ValidationError("external block name '" + e.name + "' clashes with a built-in descriptor");
    }
  }
}

// ---------------------------------------------------------------- HOG

Index hog_length(const HogConfig& cfg, int width, int height) {
  const int cx = width / cfg.cell_size;
  const int cy = height / cfg.cell_size;
  if (cx < cfg.block || cy < cfg.block) return 0;
  return static_cast<Index>(cy - cfg.block + 1) * (cx - cfg.block + 1) * cfg.block * cfg.block *
         cfg.bins;
}

Vector hog(const ImageFrame& frame, const HogConfig& cfg) {
  frame.validate();
  const int cell = cfg.cell_size;
  const int cx = frame.width / cell;
  const int cy = frame.height / cell;
  if (cx < cfg.block || cy < cfg.block) {
    throw ValidationError("frame '" + frame.image_id + "' is smaller than one HOG block");
  }
  const double bin_width = 180.0 / cfg.bins;
  std::vector<double> cells(static_cast<std::size_t>(cx) * cy * cfg.bins, 0.0);
  const int w = frame.width;
  const int h = frame.height;
  for (int y = 0; y < cy * cell; ++y) {
    for (int x = 0; x < cx * cell; ++x) {
      const double gx = double(frame.at(std::min(x + 1, w - 1), y)) - frame.at(std::max(x - 1, 0), y);
      const double gy = double(frame.at(x, std::min(y + 1, h - 1))) - frame.at(x, std::max(y - 1, 0));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const int bin = std::min(cfg.bins - 1, static_cast<int>(angle / bin_width));
      const std::size_t c = static_cast<std::size_t>(y / cell) * cx + static_cast<std::size_t>(x / cell);
      cells[c * cfg.bins + bin] += mag;
    }
  }

  const int bx = cx - cfg.block + 1;
  const int by = cy - cfg.block + 1;
  const Index block_len = static_cast<Index>(cfg.block) * cfg.block * cfg.bins;
  Vector out(static_cast<Index>(bx) * by * block_len);
  constexpr double kEps = 1e-9;
  Vector v(block_len);
  for (int j = 0; j < by; ++j) {
    for (int i = 0; i < bx; ++i) {
      Index k = 0;
      for (int dy = 0; dy < cfg.block; ++dy) {
        for (int dx = 0; dx < cfg.block; ++dx) {
          const std::size_t c = static_cast<std::size_t>(j + dy) * cx + static_cast<std::size_t>(i + dx);
          for (int b = 0; b < cfg.bins; ++b) v(k++) = cells[c * cfg.bins + b];
        }
      }
      v /= std::sqrt(v.squaredNorm() + kEps * kEps);
      v = v.cwiseMin(cfg.clip);
      v /= std::sqrt(v.squaredNorm() + kEps * kEps);
      out.segment((static_cast<Index>(j) * bx + i) * block_len, block_len) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------- LBP

namespace {

const std::array<int, 256>& uniform_table() {
  static const std::array<int, 256> table = [] {
    std::array<int, 256> t{};
    int next = 0;
    for (unsigned code = 0; code < 256; ++code) {
      const auto c = static_cast<std::uint8_t>(code);
      const int transitions = std::popcount(static_cast<unsigned>(c ^ std::rotl(c, 1)));
      t[code] = transitions <= 2 ? next++ : 58;
    }
    return t;
  }();
  return table;
}

}  // namespace

int lbp_uniform_bin(unsigned code) { return uniform_table().at(code & 0xffu); }

Index lbp_length(const LbpConfig& cfg) { return cfg.uniform ? 59 : 256; }

Vector lbp(const ImageFrame& frame, const LbpConfig& cfg) {
  frame.validate();
  const int r = cfg.radius;
  if (frame.width < 2 * r + 1 || frame.height < 2 * r + 1) {
    throw ValidationError("frame '" + frame.image_id + "' is too small for LBP");
  }
  const std::array<int, 8> dx{-r, 0, r, r, r, 0, -r, -r};
  const std::array<int, 8> dy{-r, -r, -r, 0, r, r, r, 0};
  Vector hist = Vector::Zero(lbp_length(cfg));
  for (int y = r; y < frame.height - r; ++y) {
    for (int x = r; x < frame.width - r; ++x) {
      const int centre = frame.at(x, y);
      unsigned code = 0;
      for (int i = 0; i < 8; ++i) {
        if (frame.at(x + dx[i], y + dy[i]) >= centre) code |= 1u << i;
      }
      hist(cfg.uniform ? lbp_uniform_bin(code) : static_cast<int>(code)) += 1.0;
    }
  }
  return hist / hist.sum();
}

// ---------------------------------------------------------------- external files

ExternalFeatures read_external_features(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw IngestionError(path.string() + ": empty external feature file");
  const auto head = text::split_ws(line);
  if (head.size() != 4 || head[0] != "external") {
    throw IngestionError(path.string() + ": expected 'external <name> <dim> <sensor>' header");
  }
  ExternalFeatures ext;
  ext.spec.name = head[1];
  ext.spec.dim = static_cast<Index>(text::to_int(head[2], "external dim"));
  ext.spec.sensor = parse_frame_kind(head[3]);
  if (ext.spec.dim < 1) throw IngestionError(path.string() + ": external dim must be >= 1");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = text::split_ws(line);
    if (tok.empty()) continue;
    if (static_cast<Index>(tok.size()) != ext.spec.dim + 1) {
      throw IngestionError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(ext.spec.dim) + " values after the image id");
    }
    Vector v(ext.spec.dim);
    for (Index i = 0; i < ext.spec.dim; ++i) {
      v(i) = text::to_double(tok[static_cast<std::size_t>(i) + 1], "external value");
    }
    if (!v.allFinite()) {
      throw IngestionError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    }
    ext.rows[tok[0]] = std::move(v);
  }
  return ext;
}

void write_external_features(const ExternalFeatures& ext, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "external " << ext.spec.name << ' ' << ext.spec.dim << ' ' << to_string(ext.spec.sensor) << '\n';
  for (const auto& [id, v] : ext.rows) {
    os << id;
    for (Index i = 0; i < v.size(); ++i) os << ' ' << text::hex(v(i));
    os << '\n';
  }
  if (!os) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------- assembly

ModalityLayout descriptor_layout(const DescriptorConfig& cfg, int width, int height) {
  cfg.validate();
  const Index hog_dim = hog_length(cfg.hog, width, height);
  if (hog_dim == 0) throw ValidationError("frames are smaller than one HOG block");
  std::vector<SensorBlock> sensors;
  for (FrameKind kind : {FrameKind::intensity, FrameKind::disparity}) {
    SensorBlock s{to_string(kind), {}};
    s.features.push_back({"gist", gist_length(cfg.gist)});
    s.features.push_back({"hog", hog_dim});
    s.features.push_back({"lbp", lbp_length(cfg.lbp)});
    for (const auto& e : cfg.external) {
      if (e.sensor == kind) s.features.push_back({e.name, e.dim});
    }
    sensors.push_back(std::move(s));
  }
  return ModalityLayout(std::move(sensors));
}

namespace {

const ExternalFeatures& find_external(const std::vector<ExternalFeatures>& external,
                                      const ExternalBlockSpec& spec) {
  for (const auto& e : external) {
    if (e.spec.name == spec.name && e.spec.sensor == spec.sensor) {
      if (e.spec.dim != spec.dim) {
        throw IngestionError("external block '" + spec.name + "' has dim " +
                             std::to_string(e.spec.dim) + ", expected " + std::to_string(spec.dim));
      }
      return e;
    }
  }
  throw IngestionError("no external feature file supplied for block '" + spec.name + "' (" +
                       to_string(spec.sensor) + ")");
}

}  // namespace

FeatureMatrix extract_raw(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                          const std::vector<ExternalFeatures>& external) {
  if (frames.empty()) throw ValidationError("no frames to extract");
  const int width = frames.front().intensity.width;
  const int height = frames.front().intensity.height;
  std::vector<std::string> ids;
  ids.reserve(frames.size());
  for (const auto& fp : frames) {
    const auto& id = fp.intensity.image_id;
    if (fp.intensity.pixels.empty()) throw IngestionError("missing intensity frame for image '" + id + "'");
    if (fp.disparity.pixels.empty()) throw IngestionError("missing disparity frame for image '" + id + "'");
    if (fp.disparity.image_id != id) {
      throw IngestionError("frame pair ids differ: '" + id + "' vs '" + fp.disparity.image_id + "'");
    }
    for (const ImageFrame* f : {&fp.intensity, &fp.disparity}) {
      f->validate();
      if (f->width != width || f->height != height) {
        throw IngestionError("image '" + id + "' is " + std::to_string(f->width) + "x" +
                             std::to_string(f->height) + ", expected " + std::to_string(width) +
                             "x" + std::to_string(height));
      }
    }
    ids.push_back(id);
  }

  ModalityLayout layout = descriptor_layout(cfg, width, height);
  std::vector<const ExternalFeatures*> ext_sources;
  for (const auto& spec : cfg.external) {
    const auto& src = find_external(external, spec);
    for (const auto& id : ids) {
      if (!src.rows.contains(id)) {
        throw IngestionError("external block '" + spec.name + "' has no row for image '" + id + "'");
      }
    }
    ext_sources.push_back(&src);
  }

  Matrix values(layout.total_dim(), static_cast<Index>(frames.size()));
  detail::parallel_for(frames.size(), [&](std::size_t i) {
    const auto col = static_cast<Index>(i);
    for (std::size_t q = 0; q < 2; ++q) {
      const ImageFrame& f = q == 0 ? frames[i].intensity : frames[i].disparity;
      const FrameKind kind = q == 0 ? FrameKind::intensity : FrameKind::disparity;
      values.col(col).segment(layout.feature_range(q, 0).begin, layout.feature_range(q, 0).size()) =
          gist(f, cfg.gist);
      values.col(col).segment(layout.feature_range(q, 1).begin, layout.feature_range(q, 1).size()) =
          hog(f, cfg.hog);
      values.col(col).segment(layout.feature_range(q, 2).begin, layout.feature_range(q, 2).size()) =
          lbp(f, cfg.lbp);
      std::size_t k = 3;
      for (std::size_t e = 0; e < cfg.external.size(); ++e) {
        if (cfg.external[e].sensor != kind) continue;
        const RowRange r = layout.feature_range(q, k++);
        values.col(col).segment(r.begin, r.size()) = ext_sources[e]->rows.at(ids[i]);
      }
    }
  });
  return FeatureMatrix(std::move(layout), std::move(values), std::move(ids));
}

BlockNormalization::BlockNormalization(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size()) throw ValidationError("normalization mean/stddev sizes differ");
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    if (!std::isfinite(mean_[i]) || !std::isfinite(stddev_[i]) || stddev_[i] < 0.0) {
      throw ValidationError("normalization statistics must be finite with stddev >= 0");
    }
  }
}

BlockNormalization BlockNormalization::fit(const FeatureMatrix& raw) {
  std::vector<double> mean;
  std::vector<double> stddev;
  const Matrix& v = raw.values();
  for (const auto& b : raw.layout().blocks()) {
    const auto blk = v.middleRows(b.rows.begin, b.rows.size());
    const double count = static_cast<double>(blk.size());
    const double mu = blk.sum() / count;
    const double var = (blk.array() - mu).square().sum() / count;
    double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) sd = 0.0;
    mean.push_back(mu);
    stddev.push_back(sd);
  }
  return BlockNormalization(std::move(mean), std::move(stddev));
}

FeatureMatrix BlockNormalization::apply(const FeatureMatrix& raw) const {
  const auto& blocks = raw.layout().blocks();
  if (blocks.size() != mean_.size()) {
    throw ModelError("normalization has " + std::to_string(mean_.size()) +
                     " blocks but the features have " + std::to_string(blocks.size()));
  }
  Matrix out(raw.values().rows(), raw.values().cols());
  for (std::size_t g = 0; g < blocks.size(); ++g) {
    const RowRange r = blocks[g].rows;
    if (stddev_[g] == 0.0) {
      out.middleRows(r.begin, r.size()).setZero();
    } else {
      out.middleRows(r.begin, r.size()) =
          (raw.values().middleRows(r.begin, r.size()).array() - mean_[g]) / stddev_[g];
    }
  }
  return FeatureMatrix(raw.layout(), std::move(out), raw.image_ids());
}

Extraction extract_all(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                       const std::vector<ExternalFeatures>& external) {
  FeatureMatrix raw = extract_raw(frames, cfg, external);
  BlockNormalization norm = BlockNormalization::fit(raw);
  FeatureMatrix normalized = norm.apply(raw);
  return {std::move(normalized), std::move(norm)};
}

FeatureMatrix extract_normalized(const std::vector<FramePair>& frames, const DescriptorConfig& cfg,
                                 const BlockNormalization& norm,
                                 const std::vector<ExternalFeatures>& external) {
  return norm.apply(extract_raw(frames, cfg, external));
}

}  // namespace msplace
