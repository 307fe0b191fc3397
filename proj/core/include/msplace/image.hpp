#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace msplace {

enum class FrameKind { intensity, disparity };

std::string to_string(FrameKind k);
FrameKind parse_frame_kind(const std::string& s);

/// 8-bit grayscale image, row-major.
struct ImageFrame {
  std::vector<std::uint8_t> pixels;
  int width = 0;
  int height = 0;
  FrameKind kind = FrameKind::intensity;
  std::string image_id;
  double timestamp = 0.0;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  static ImageFrame filled(int width, int height, std::uint8_t value);
  void validate() const;
};

/// Standard working resolution for panoramas (height x width = 120 x 752).
inline constexpr int kStandardWidth = 752;
inline constexpr int kStandardHeight = 120;

/// Area-averaged resize to exactly target_w x target_h. Each output pixel is
/// the coverage-weighted mean of the source pixels under its footprint,
/// rounded half-up. Throws ValidationError when asked to upscale.
ImageFrame downsample(const ImageFrame& frame, int target_w, int target_h);

/// Mirror image about the vertical axis.
ImageFrame flip_horizontal(const ImageFrame& frame);

/// Binary (P5) or ASCII (P2) PGM with maxval <= 255.
ImageFrame read_pgm(const std::filesystem::path& path);
void write_pgm(const ImageFrame& frame, const std::filesystem::path& path);
/// Any PNG, converted to 8-bit grayscale.
ImageFrame read_png(const std::filesystem::path& path);
/// Dispatches on the file extension (.pgm or .png).
ImageFrame read_image(const std::filesystem::path& path);

}  // namespace msplace
