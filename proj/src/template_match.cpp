#include "adwar/template_match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adwar {

ImageTemplate ImageTemplate::from_bitmap(const ImageBitmap& img) { return ImageTemplate(to_gray(img)); }

ImageTemplate ImageTemplate::from_png(const std::string& path) { return from_bitmap(load_png(path)); }

void ImageTemplate::validate() const {
  if (gray.empty()) throw std::invalid_argument("template image is empty");
  if (scales.empty()) throw std::invalid_argument("template has no scales");
  for (double s : scales) {
    if (!(s > 0)) throw std::invalid_argument("template scales must be positive");
  }
  if (!(max_nrmse >= 0 && max_nrmse <= 1)) throw std::invalid_argument("template threshold must be in [0,1]");
}

double nrmse_from_ssd(std::uint64_t ssd, std::size_t n) {
  return std::sqrt(static_cast<double>(ssd) / static_cast<double>(n)) / 255.0;
}

namespace {

// Largest SSD whose score can still be <= `score`, padded so the cut never
// rejects a candidate the exact comparison would accept.
std::uint64_t ssd_ceiling(double score, std::size_t n) {
  const double v = score * score * 65025.0 * static_cast<double>(n);
  if (v >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(v * (1 + 1e-9)) + 1;
}

}  // namespace

std::optional<TemplateMatch> match_image(const GrayImage& hay, const ImageTemplate& tmpl,
                                         const SearchWindow& window) {
  tmpl.validate();
  if (hay.empty()) throw TemplateTooLarge("haystack is empty");

  std::optional<TemplateMatch> best;
  bool any_fits = false;
  for (std::size_t si = 0; si < tmpl.scales.size(); ++si) {
    const GrayImage t = scale_gray(tmpl.gray, tmpl.scales[si]);
    if (t.width > hay.width || t.height > hay.height) continue;
    any_fits = true;
    const int x_lo = std::max(0, window.x0);
    const int y_lo = std::max(0, window.y0);
    const int x_hi = std::min(hay.width - t.width, window.x1);
    const int y_hi = std::min(hay.height - t.height, window.y1);
    const std::size_t n = t.px.size();

    std::uint64_t cap = ssd_ceiling(tmpl.max_nrmse, n);
    if (best) cap = std::min(cap, ssd_ceiling(best->score, n));
    std::uint64_t scale_best = std::numeric_limits<std::uint64_t>::max();
    int bx = 0, by = 0;

    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const std::uint64_t limit = std::min(cap, scale_best);
        std::uint64_t ssd = 0;
        for (int r = 0; r < t.height && ssd <= limit; ++r) {
          const std::uint8_t* hp = &hay.px[static_cast<std::size_t>(y + r) * hay.width + x];
          const std::uint8_t* tp = &t.px[static_cast<std::size_t>(r) * t.width];
          for (int c = 0; c < t.width; ++c) {
            const int d = int(hp[c]) - int(tp[c]);
            ssd += static_cast<std::uint64_t>(d * d);
          }
        }
        if (ssd <= limit && ssd < scale_best) {
          scale_best = ssd;
          bx = x;
          by = y;
        }
      }
    }
    if (scale_best == std::numeric_limits<std::uint64_t>::max()) continue;
    const double score = nrmse_from_ssd(scale_best, n);
    if (score > tmpl.max_nrmse) continue;
    if (!best || score < best->score) {
      best = TemplateMatch{bx, by, tmpl.scales[si], si, t.width, t.height, score};
    }
  }
  if (!any_fits) throw TemplateTooLarge("template is larger than the haystack at every scale");
  return best;
}

std::optional<TemplateMatch> match_image(const ImageBitmap& haystack, const ImageTemplate& tmpl) {
  return match_image(to_gray(haystack), tmpl);
}

}  // namespace adwar
