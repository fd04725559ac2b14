#include "adwar/text_recognition.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "adwar/template_match.hpp"
#include "adwar/util.hpp"

namespace adwar {

BitmapFont BitmapFont::parse(std::string_view text) {
  BitmapFont font;
  const auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("glyph ", 0) != 0) {
      throw std::invalid_argument("font line " + std::to_string(i + 1) + ": expected 'glyph <char>'");
    }
    const std::string_view name = line.substr(6);
    char c;
    if (name == "space") {
      c = ' ';
    } else if (name.size() == 1) {
      c = name[0];
    } else {
      throw std::invalid_argument("font line " + std::to_string(i + 1) + ": bad glyph name");
    }
    if (font.index_.count(c)) throw std::invalid_argument(std::string("duplicate glyph '") + c + "'");
    std::vector<bool> bits;
    for (int r = 0; r < kGlyphH; ++r) {
      if (++i >= lines.size()) throw std::invalid_argument("font ends inside a glyph");
      const std::string_view row = trim(lines[i]);
      if (row.size() != kGlyphW || row.find_first_not_of(".#") != std::string_view::npos) {
        throw std::invalid_argument("font line " + std::to_string(i + 1) + ": expected 5 cells of '.' or '#'");
      }
      for (char cell : row) bits.push_back(cell == '#');
    }
    font.index_[c] = font.chars_.size();
    font.chars_ += c;
    font.bits_.push_back(std::move(bits));
  }
  if (font.chars_.empty()) throw std::invalid_argument("font has no glyphs");
  return font;
}

BitmapFont BitmapFont::load(const std::string& path) { return parse(read_file(path)); }

bool BitmapFont::pixel(char c, int x, int y) const {
  return bits_[index_.at(c)][static_cast<std::size_t>(y * kGlyphW + x)];
}

const BitmapFont& default_font() {
  static const BitmapFont font = BitmapFont::load(asset_path("font5x7.txt"));
  return font;
}

int text_width(std::string_view text, int size) {
  return static_cast<int>(text.size()) * BitmapFont::kAdvance * size;
}

void draw_text(ImageBitmap& img, const BitmapFont& font, int x, int y, std::string_view text, int size, Rgba fg) {
  if (size < 1) throw std::invalid_argument("text size must be >= 1");
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!font.has(c)) throw std::invalid_argument(std::string("font has no glyph for '") + c + "'");
    const int cx = x + static_cast<int>(i) * BitmapFont::kAdvance * size;
    for (int gy = 0; gy < BitmapFont::kGlyphH * size; ++gy) {
      for (int gx = 0; gx < BitmapFont::kGlyphW * size; ++gx) {
        const int px = cx + gx, py = y + gy;
        if (px < 0 || py < 0 || px >= img.width || py >= img.height) continue;
        if (font.pixel(c, gx / size, gy / size)) img.set(px, py, fg);
      }
    }
  }
}

ImageBitmap render_text(const BitmapFont& font, std::string_view text, int size, Rgba fg, Rgba bg) {
  if (size < 1) throw std::invalid_argument("text size must be >= 1");
  ImageBitmap img(std::max(1, text_width(text, size)), BitmapFont::kGlyphH * size, bg);
  draw_text(img, font, 0, 0, text, size, fg);
  return img;
}

MarkerLexicon MarkerLexicon::defaults() {
  return {{{"Sponsored", 1}, {"AdChoices", 1}, {"Close Ad", 1}, {"Ad", 0}}};
}

void MarkerLexicon::validate() const {
  for (const auto& e : entries) {
    if (e.word.empty()) throw std::invalid_argument("lexicon word is empty");
    if (e.max_distance >= e.word.size()) {
      throw std::invalid_argument("edit-distance bound for '" + e.word + "' must be below its length");
    }
  }
}

GlyphRecognizer::GlyphRecognizer(const BitmapFont& font, GlyphRecognizerConfig cfg)
    : font_(font), cfg_(std::move(cfg)) {
  for (int s : cfg_.sizes) {
    if (s < 1) throw std::invalid_argument("text sizes must be >= 1");
  }
}

std::uint64_t GlyphRecognizer::cell_ssd(const GrayImage& gray, int x, int y, int size, char c,
                                        std::uint64_t stop_above) const {
  std::uint64_t ssd = 0;
  for (int gy = 0; gy < BitmapFont::kGlyphH * size && ssd <= stop_above; ++gy) {
    const std::uint8_t* row = &gray.px[static_cast<std::size_t>(y + gy) * gray.width + x];
    for (int gx = 0; gx < BitmapFont::kGlyphW * size; ++gx) {
      const int expected = font_.pixel(c, gx / size, gy / size) ? 0 : 255;
      const int d = int(row[gx]) - expected;
      ssd += static_cast<std::uint64_t>(d * d);
    }
  }
  return ssd;
}

char GlyphRecognizer::read_cell(const GrayImage& gray, int x, int y, int size) const {
  const std::size_t n = static_cast<std::size_t>(BitmapFont::kGlyphW * BitmapFont::kGlyphH * size * size);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  char best_c = '_';
  for (char c : font_.chars()) {
    const auto ssd = cell_ssd(gray, x, y, size, c);
    if (ssd < best) {
      best = ssd;
      best_c = c;
    }
  }
  return nrmse_from_ssd(best, n) <= cfg_.cell_threshold ? best_c : '_';
}

std::vector<RecognizedWord> GlyphRecognizer::recognize(const ImageBitmap& region, const MarkerLexicon& lex) const {
  lex.validate();
  std::vector<RecognizedWord> out;
  if (region.empty()) return out;
  const GrayImage gray = stretch_contrast(to_gray(region));

  for (const auto& entry : lex.entries) {
    const std::string& word = entry.word;
    bool renderable = true;
    for (char c : word) renderable = renderable && font_.has(c);
    if (!renderable) continue;

    std::optional<RecognizedWord> best;
    std::uint64_t best_total = 0;
    for (int size : cfg_.sizes) {
      const int cell_w = BitmapFont::kGlyphW * size;
      const int adv = BitmapFont::kAdvance * size;
      const int span_w = static_cast<int>(word.size() - 1) * adv + cell_w;
      const int span_h = BitmapFont::kGlyphH * size;
      if (span_w > gray.width || span_h > gray.height) continue;
      const std::size_t n = static_cast<std::size_t>(cell_w * span_h);
      // Any SSD above this is over the cell threshold.
      const auto cap = static_cast<std::uint64_t>(cfg_.cell_threshold * cfg_.cell_threshold * 65025.0 * n * (1 + 1e-9)) + 1;

      for (int y = 0; y + span_h <= gray.height; ++y) {
        for (int x = 0; x + span_w <= gray.width; ++x) {
          // A cell whose expected glyph is over threshold is a certain
          // mismatch; skip placements that already exceed the bound.
          std::size_t certain = 0;
          std::uint64_t total = 0;
          for (std::size_t i = 0; i < word.size() && certain <= entry.max_distance; ++i) {
            const auto ssd = cell_ssd(gray, x + static_cast<int>(i) * adv, y, size, word[i], cap);
            if (ssd > cap || nrmse_from_ssd(ssd, n) > cfg_.cell_threshold) ++certain;
          }
          if (certain > entry.max_distance) continue;
          for (std::size_t i = 0; i < word.size(); ++i) {
            total += cell_ssd(gray, x + static_cast<int>(i) * adv, y, size, word[i]);
          }

          std::string read;
          std::size_t dist = 0;
          for (std::size_t i = 0; i < word.size(); ++i) {
            const char c = read_cell(gray, x + static_cast<int>(i) * adv, y, size);
            read += c;
            if (c != word[i]) ++dist;
          }
          if (dist > entry.max_distance) continue;
          if (!best || std::tie(dist, total) < std::tie(best->distance, best_total)) {
            best = RecognizedWord{word, read, x, y, size, dist};
            best_total = total;
          }
        }
      }
    }
    if (best) out.push_back(std::move(*best));
  }
  return out;
}

std::vector<RecognizedWord> recognize_text(const ImageBitmap& region, const MarkerLexicon& lex) {
  static const GlyphRecognizer recognizer;
  return recognizer.recognize(region, lex);
}

}  // namespace adwar
