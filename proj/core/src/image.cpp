#include "msplace/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "msplace/error.hpp"

namespace msplace {

std::string to_string(FrameKind k) { return k == FrameKind::intensity ? "intensity" : "disparity"; }

FrameKind parse_frame_kind(const std::string& s) {
  if (s == "intensity") return FrameKind::intensity;
  if (s == "disparity") return FrameKind::disparity;
  throw ValidationError("unknown frame kind '" + s + "'");
}

ImageFrame ImageFrame::filled(int width, int height, std::uint8_t value) {
  ImageFrame f;
  f.width = width;
  f.height = height;
  f.pixels.assign(static_cast<std::size_t>(width) * height, value);
  return f;
}

void ImageFrame::validate() const {
  if (width < 1 || height < 1) throw ValidationError("image '" + image_id + "' has empty dimensions");
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("image '" + image_id + "' pixel count does not match width*height");
  }
}

namespace {

// Coverage of source cells by each output cell along one axis.
struct Footprint {
  int first = 0;
  std::vector<double> weights;
};

std::vector<Footprint> footprints(int src, int dst) {
  std::vector<Footprint> out(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
    auto& fp = out[static_cast<std::size_t>(i)];
    fp.first = first;
    for (int s = first; s <= last; ++s) {
      const double w = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      fp.weights.push_back(w > 0.0 ? w : 0.0);
    }
  }
  return out;
}

}  // namespace

ImageFrame downsample(const ImageFrame& frame, int target_w, int target_h) {
  frame.validate();
  if (target_w < 1 || target_h < 1) throw ValidationError("downsample target must be positive");
  if (target_w > frame.width || target_h > frame.height) {
    throw ValidationError("downsample of '" + frame.image_id + "' from " +
                          std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                          " to " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                          " would upscale");
  }
  ImageFrame out = frame;
  out.width = target_w;
  out.height = target_h;
  if (target_w == frame.width && target_h == frame.height) return out;

  const auto fx = footprints(frame.width, target_w);
  const auto fy = footprints(frame.height, target_h);
  const double area = (static_cast<double>(frame.width) / target_w) *
                      (static_cast<double>(frame.height) / target_h);

  // Horizontal pass into doubles, then vertical.
  std::vector<double> rows(static_cast<std::size_t>(frame.height) * target_w);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < target_w; ++x) {
      const auto& fp = fx[static_cast<std::size_t>(x)];
      double acc = 0.0;
      for (std::size_t k = 0; k < fp.weights.size(); ++k) {
        acc += fp.weights[k] * frame.at(fp.first + static_cast<int>(k), y);
      }
      rows[static_cast<std::size_t>(y) * target_w + x] = acc;
    }
  }
  out.pixels.assign(static_cast<std::size_t>(target_w) * target_h, 0);
  for (int y = 0; y < target_h; ++y) {
    const auto& fp = fy[static_cast<std::size_t>(y)];
    for (int x = 0; x < target_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < fp.weights.size(); ++k) {
        acc += fp.weights[k] * rows[static_cast<std::size_t>(fp.first + static_cast<int>(k)) * target_w + x];
      }
      const double v = std::floor(acc / area + 0.5);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return out;
}

ImageFrame flip_horizontal(const ImageFrame& frame) {
  frame.validate();
  ImageFrame out = frame;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) out.at(x, y) = frame.at(frame.width - 1 - x, y);
  }
  return out;
}

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(std::istream& is) {
  std::string tok;
  char ch;
  while (is.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

}  // namespace

ImageFrame read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(is);
  if (magic != "P5" && magic != "P2") throw IngestionError(path.string() + ": not a PGM file");
  ImageFrame f;
  try {
    f.width = std::stoi(pnm_token(is));
    f.height = std::stoi(pnm_token(is));
    const int maxval = std::stoi(pnm_token(is));
    if (maxval < 1 || maxval > 255) throw IngestionError(path.string() + ": only 8-bit PGM is supported");
  } catch (const std::logic_error&) {
    throw IngestionError(path.string() + ": malformed PGM header");
  }
  if (f.width < 1 || f.height < 1) throw IngestionError(path.string() + ": bad PGM dimensions");
  f.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
  if (magic == "P5") {
    is.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (is.gcount() != static_cast<std::streamsize>(f.pixels.size())) {
      throw IngestionError(path.string() + ": truncated PGM data");
    }
  } else {
    for (auto& px : f.pixels) {
      int v = 0;
      if (!(is >> v) || v < 0 || v > 255) throw IngestionError(path.string() + ": bad ASCII PGM data");
      px = static_cast<std::uint8_t>(v);
    }
  }
  return f;
}

void write_pgm(const ImageFrame& frame, const std::filesystem::path& path) {
  frame.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(frame.pixels.data()),
           static_cast<std::streamsize>(frame.pixels.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

ImageFrame read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IngestionError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  ImageFrame f;
  f.width = static_cast<int>(image.width);
  f.height = static_cast<int>(image.height);
  f.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, f.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestionError(path.string() + ": " + msg);
  }
  return f;
}

ImageFrame read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".png") return read_png(path);
  throw IngestionError(path.string() + ": unsupported image extension '" + ext + "'");
}

}  // namespace msplace
