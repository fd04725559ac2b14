#include "adwar/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace adwar {

std::uint8_t luma(const Rgba& c) {
  auto over_white = [&](std::uint8_t v) { return (v * c.a + 255.0 * (255 - c.a)) / 255.0; };
  const double y = 0.299 * over_white(c.r) + 0.587 * over_white(c.g) + 0.114 * over_white(c.b);
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

GrayImage to_gray(const ImageBitmap& img) {
  GrayImage g(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) g.at(x, y) = luma(img.at(x, y));
  }
  return g;
}

GrayImage stretch_contrast(const GrayImage& img) {
  if (img.empty()) return img;
  const auto [lo, hi] = std::minmax_element(img.px.begin(), img.px.end());
  const int a = *lo, range = *hi - *lo;
  if (range < 32) return img;
  GrayImage out = img;
  for (auto& v : out.px) v = static_cast<std::uint8_t>(((int(v) - a) * 255 + range / 2) / range);
  return out;
}

GrayImage scale_gray(const GrayImage& img, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("scale must be positive");
  if (scale == 1.0) return img;
  const int w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height * scale)));
  GrayImage out(w, h);
  const double fx = static_cast<double>(img.width) / w;
  const double fy = static_cast<double>(img.height) / h;
  for (int y = 0; y < h; ++y) {
    const double sy = std::clamp((y + 0.5) * fy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ty = sy - y0;
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp((x + 0.5) * fx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double tx = sx - x0;
      const double top = img.at(x0, y0) * (1 - tx) + img.at(x1, y0) * tx;
      const double bottom = img.at(x0, y1) * (1 - tx) + img.at(x1, y1) * tx;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - ty) + bottom * ty), 0L, 255L));
    }
  }
  return out;
}

GrayImage crop(const GrayImage& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > img.width || y + h > img.height) {
    throw std::out_of_range("crop outside image");
  }
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    std::copy_n(img.px.begin() + static_cast<std::ptrdiff_t>((y + r) * img.width + x), w,
                out.px.begin() + static_cast<std::ptrdiff_t>(r * w));
  }
  return out;
}

ImageBitmap crop(const ImageBitmap& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > img.width || y + h > img.height) {
    throw std::out_of_range("crop outside image");
  }
  ImageBitmap out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out.set(c, r, img.at(x + c, y + r));
  }
  return out;
}

void composite(ImageBitmap& dst, const ImageBitmap& src, int x, int y) {
  for (int r = 0; r < src.height; ++r) {
    const int dy = y + r;
    if (dy < 0 || dy >= dst.height) continue;
    for (int c = 0; c < src.width; ++c) {
      const int dx = x + c;
      if (dx < 0 || dx >= dst.width) continue;
      const Rgba s = src.at(c, r);
      if (s.a == 255) {
        dst.set(dx, dy, s);
        continue;
      }
      const Rgba d = dst.at(dx, dy);
      auto mix = [&](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround((a * s.a + b * (255 - s.a)) / 255.0));
      };
      dst.set(dx, dy, {mix(s.r, d.r), mix(s.g, d.g), mix(s.b, d.b),
                       static_cast<std::uint8_t>(std::max(s.a, d.a))});
    }
  }
}

ImageBitmap load_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw std::runtime_error("cannot read PNG " + path + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  ImageBitmap out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.rgba.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr)) {
    png_image_free(&image);
    throw std::runtime_error("cannot decode PNG " + path + ": " + image.message);
  }
  return out;
}

void save_png(const ImageBitmap& img, const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGBA;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.rgba.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write PNG " + path + ": " + image.message);
  }
}

}  // namespace adwar
