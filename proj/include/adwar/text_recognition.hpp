#pragma once

// Text-in-image recognition. The reference recognizer renders each lexicon
// word in a small bitmap font and scans for it cell by cell; a real OCR
// engine can be plugged in through TextRecognizer.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adwar/image.hpp"

namespace adwar {

class BitmapFont {
 public:
  static constexpr int kGlyphW = 5;
  static constexpr int kGlyphH = 7;
  static constexpr int kAdvance = 6;

  static BitmapFont parse(std::string_view text);
  static BitmapFont load(const std::string& path);

  bool has(char c) const { return index_.count(c) > 0; }
  bool pixel(char c, int x, int y) const;
  const std::string& chars() const { return chars_; }  // in file order

 private:
  std::string chars_;
  std::vector<std::vector<bool>> bits_;
  std::map<char, std::size_t> index_;
};

/// The bundled 5x7 font, loaded once.
const BitmapFont& default_font();

/// Black text on a white background; size is an integer pixel multiplier.
/// Throws std::invalid_argument on characters missing from the font.
ImageBitmap render_text(const BitmapFont& font, std::string_view text, int size,
                        Rgba fg = {0, 0, 0, 255}, Rgba bg = {255, 255, 255, 255});
/// Draws only the foreground pixels of `text` onto `img`.
void draw_text(ImageBitmap& img, const BitmapFont& font, int x, int y, std::string_view text, int size,
               Rgba fg = {0, 0, 0, 255});
int text_width(std::string_view text, int size);

struct MarkerLexicon {
  struct Entry {
    std::string word;
    std::size_t max_distance = 0;
  };
  std::vector<Entry> entries;

  static MarkerLexicon defaults();  // Sponsored, AdChoices, Close Ad, Ad
  /// Throws std::invalid_argument when a bound is not below the word length.
  void validate() const;
};

struct RecognizedWord {
  std::string word;  // lexicon entry
  std::string read;  // what the recognizer saw; '_' where no glyph fit
  int x = 0;
  int y = 0;
  int size = 1;
  std::size_t distance = 0;
};

class TextRecognizer {
 public:
  virtual ~TextRecognizer() = default;
  virtual std::vector<RecognizedWord> recognize(const ImageBitmap& region, const MarkerLexicon& lex) const = 0;
};

struct GlyphRecognizerConfig {
  std::vector<int> sizes{1, 2};
  double cell_threshold = 0.25;  // per-glyph normalized RMSE
};

/// Reference recognizer. The region is contrast-stretched first, so grey
/// text on a light ground reads like black on white. For each word, every placement is read one cell at
/// a time (best glyph per cell); a cell counts as a mismatch when its best
/// glyph is not the expected one or scores above the cell threshold. The
/// placement with the fewest mismatches is reported when within the word's
/// bound. Ties: lower total distance to the expected glyphs, then smaller
/// size, row, column.
class GlyphRecognizer : public TextRecognizer {
 public:
  explicit GlyphRecognizer(const BitmapFont& font = default_font(), GlyphRecognizerConfig cfg = {});
  std::vector<RecognizedWord> recognize(const ImageBitmap& region, const MarkerLexicon& lex) const override;

  /// Best glyph for the cell whose top-left is (x, y): ('_' if none fits).
  char read_cell(const GrayImage& gray, int x, int y, int size) const;

 private:
  // Stops summing (returning a value above `stop_above`) once exceeded.
  std::uint64_t cell_ssd(const GrayImage& gray, int x, int y, int size, char c,
                         std::uint64_t stop_above = UINT64_MAX) const;

  const BitmapFont& font_;
  GlyphRecognizerConfig cfg_;
};

std::vector<RecognizedWord> recognize_text(const ImageBitmap& region, const MarkerLexicon& lex);

}  // namespace adwar
