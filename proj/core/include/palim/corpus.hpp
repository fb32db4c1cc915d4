#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "palim/image.hpp"
#include "palim/segmentation.hpp"

namespace palim {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Rows top to bottom; bit 4 is the leftmost column. Covers a-z and 0-9;
/// nullptr for anything else.
const std::array<std::uint8_t, kGlyphHeight>* glyph(char c);

/// Ink of `text` at `scale` pixels per font pixel. Glyphs are set
/// proportionally (blank glyph columns trimmed) one font pixel apart; a space
/// advances by kWordGap font pixels. Height is always 7 * scale.
BinaryImage render_text(std::string_view text, int scale = 2);

inline constexpr int kWordGap = 7;     // font pixels between words
inline constexpr int kLinePitch = 11;  // font pixels from one baseline to the next

/// Segmentation settings matched to text rendered at `scale`.
PageSegmentParams corpus_segment_params(int scale = 4);

/// Flips each pixel independently with probability `p` (ink <-> paper).
GrayImage add_salt_pepper(const GrayImage& g, double p, std::uint64_t seed);

struct CorpusParams {
  int words = 10;  // distinct query words
  int repeats = 3;  // occurrences of each query word
  double noise = 0.0;
  std::uint64_t seed = 0;
  int pages = 0;  // 0: ceil(words * repeats / 3)
  int page_width = 512;
  int page_height = 512;
  int scale = 4;  // about 10-point type at 300 dpi
  int words_per_page = 20;  // query occurrences plus filler words
  /// Fillers that differ from a query word in one letter of the same width;
  /// the rest are random strings.
  double confusable_fraction = 1.0;
};

struct Occurrence {
  std::string word;
  int page = 0;
  Box box;  // tight ink box in page coordinates
};

struct Corpus {
  std::vector<std::string> query_words;
  std::vector<BinaryImage> queries;  // tight clean renders, parallel to query_words
  std::vector<std::string> page_ids;
  std::vector<GrayImage> pages;
  std::vector<GrayImage> clean_pages;
  std::vector<Occurrence> occurrences;  // query words only, grouped by page in reading order
};

/// Deterministic in `params`. The noise stream is separate from the layout
/// stream, so clean_pages do not depend on `noise`.
Corpus generate_corpus(const CorpusParams& params);

/// pages/<id>.pgm, queries/<word>.pgm, manifest.tsv (`id path label`) and
/// groundtruth.tsv (`word page x y w h`).
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

struct PageStyle {
  int width = 512;
  int height = 512;
  int scale = 2;
  int margin = 16;
  int line_pitch = kLinePitch;  // font pixels
  double line_fill = 1.0;  // fraction of the text width a line may use
  int columns = 1;
  bool figure = false;  // a filled illustration block in the upper half
};

/// A page of random filler text in `style`.
GrayImage text_page(const PageStyle& style, std::mt19937_64& rng);

/// `n` pages with randomly varied styles, for retrieval experiments.
std::vector<GrayImage> document_set(int n, std::uint64_t seed);

}  // namespace palim
