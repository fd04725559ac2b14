#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "adwar/image.hpp"

namespace adwar {

struct ImageTemplate {
  GrayImage gray;
  std::vector<double> scales{0.5, 0.75, 1.0, 1.25};
  double max_nrmse = 0.15;

  ImageTemplate() = default;
  explicit ImageTemplate(GrayImage g) : gray(std::move(g)) {}
  static ImageTemplate from_bitmap(const ImageBitmap& img);
  static ImageTemplate from_png(const std::string& path);

  /// Throws std::invalid_argument on an empty image, a non-positive scale or
  /// a threshold outside [0,1].
  void validate() const;
};

struct TemplateMatch {
  int x = 0;
  int y = 0;
  double scale = 1.0;
  std::size_t scale_index = 0;
  int width = 0;   // scaled template size
  int height = 0;
  double score = 0;  // normalized RMSE in [0,1]
};

class TemplateTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sum of squared differences to normalized RMSE.
double nrmse_from_ssd(std::uint64_t ssd, std::size_t n);

/// Rectangle of allowed top-left positions (inclusive bounds are clipped to
/// what fits for each scale).
struct SearchWindow {
  int x0 = 0, y0 = 0, x1 = 1 << 30, y1 = 1 << 30;
};

/// Exhaustive search over every position and scale; returns the minimum
/// normalized RMSE (ties: lower scale index, then row, then column) when it
/// is within the threshold. Sums are abandoned early once they cannot beat
/// the best so far, which does not change the result.
std::optional<TemplateMatch> match_image(const GrayImage& haystack, const ImageTemplate& tmpl,
                                         const SearchWindow& window = {});
std::optional<TemplateMatch> match_image(const ImageBitmap& haystack, const ImageTemplate& tmpl);

}  // namespace adwar
