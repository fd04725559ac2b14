#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adwar/snapshot.hpp"

namespace adwar {

/// 8-bit single-channel image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> px;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return width == 0 || height == 0; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Rec.601 luma after compositing over white.
std::uint8_t luma(const Rgba& c);
GrayImage to_gray(const ImageBitmap& img);

/// Linear stretch of [min, max] onto [0, 255]. Near-flat images (range
/// below 32) come back unchanged.
GrayImage stretch_contrast(const GrayImage& img);

/// Bilinear resample to round(w*scale) x round(h*scale) (at least 1x1).
/// Scale 1.0 is an exact copy.
GrayImage scale_gray(const GrayImage& img, double scale);

GrayImage crop(const GrayImage& img, int x, int y, int w, int h);
ImageBitmap crop(const ImageBitmap& img, int x, int y, int w, int h);

/// Alpha-composites `src` onto `dst` with its top-left at (x, y); clipped.
void composite(ImageBitmap& dst, const ImageBitmap& src, int x, int y);

ImageBitmap load_png(const std::string& path);
void save_png(const ImageBitmap& img, const std::string& path);

}  // namespace adwar
