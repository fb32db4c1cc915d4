#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "check.hpp"
#include "oracles.hpp"
#include "palim/corpus.hpp"
#include "palim/image_io.hpp"

using namespace palim;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Font, CoversLettersAndDigits) {
  for (char c = 'a'; c <= 'z'; ++c) EXPECT_NE(glyph(c), nullptr) << c;
  for (char c = '0'; c <= '9'; ++c) EXPECT_NE(glyph(c), nullptr) << c;
  EXPECT_EQ(glyph('A'), nullptr);
  EXPECT_EQ(glyph('#'), nullptr);
}

TEST(Font, GlyphsAreDistinct) {
  const std::string all = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::set<std::array<std::uint8_t, kGlyphHeight>> seen;
  for (char c : all) EXPECT_TRUE(seen.insert(*glyph(c)).second) << c;
}

TEST(Font, RenderMatchesBitmap) {
  const auto img = render_text("h", 3);
  EXPECT_EQ(img.height(), kGlyphHeight * 3);
  const auto& rows = *glyph('h');
  int first = kGlyphWidth, last = -1;
  for (int col = 0; col < kGlyphWidth; ++col)
    for (auto r : rows)
      if (r & (1 << (kGlyphWidth - 1 - col))) first = std::min(first, col), last = std::max(last, col);
  ASSERT_EQ(img.width(), (last - first + 1) * 3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const bool bit = rows[y / 3] & (1 << (kGlyphWidth - 1 - (first + x / 3)));
      ASSERT_EQ(img.get(x, y), bit);
    }
}

TEST(Font, WordGapAndErrors) {
  const int a = render_text("ab", 2).width();
  const int b = render_text("a b", 2).width();
  EXPECT_EQ(b - a, (kWordGap - 1) * 2);
  EXPECT_EQ(test::error_code([] { render_text("A", 2); }), ErrorCode::invalid_argument);
  EXPECT_EQ(test::error_code([] { render_text("a", 0); }), ErrorCode::invalid_argument);
}

TEST(SaltPepper, RateAndDeterminism) {
  const GrayImage g(200, 200, 255);
  const auto n = add_salt_pepper(g, 0.1, 3);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < g.pixels().size(); ++i) flipped += n.pixels()[i] != g.pixels()[i];
  EXPECT_NEAR(flipped / 40000.0, 0.1, 0.01);
  EXPECT_EQ(n, add_salt_pepper(g, 0.1, 3));
  EXPECT_NE(n, add_salt_pepper(g, 0.1, 4));
  EXPECT_EQ(add_salt_pepper(g, 0.0, 3), g);
  EXPECT_EQ(test::error_code([&] { add_salt_pepper(g, 1.0, 3); }), ErrorCode::invalid_argument);
}

TEST(Corpus, OccurrenceCounts) {
  CorpusParams p;
  const auto c = generate_corpus(p);
  EXPECT_EQ(c.query_words.size(), 10u);
  EXPECT_EQ(c.queries.size(), 10u);
  EXPECT_EQ(c.occurrences.size(), 30u);
  EXPECT_EQ(c.pages.size(), 10u);
  std::map<std::string, int> per_word;
  for (const auto& o : c.occurrences) ++per_word[o.word];
  EXPECT_EQ(per_word.size(), 10u);
  for (const auto& [w, n] : per_word) EXPECT_EQ(n, 3) << w;
  std::set<std::string> distinct(c.query_words.begin(), c.query_words.end());
  EXPECT_EQ(distinct.size(), 10u);
}

TEST(Corpus, OccurrenceBoxesHoldTheQueryInk) {
  const auto c = generate_corpus({});
  for (const auto& o : c.occurrences) {
    const auto qi = std::find(c.query_words.begin(), c.query_words.end(), o.word) - c.query_words.begin();
    const auto page = binarize(c.clean_pages[o.page], FixedThreshold{128});
    EXPECT_EQ(crop(page, o.box), c.queries[qi]) << o.word;
  }
}

TEST(Corpus, CleanPagesIgnoreNoise) {
  CorpusParams p;
  const auto a = generate_corpus(p);
  p.noise = 0.02;
  const auto b = generate_corpus(p);
  EXPECT_EQ(a.clean_pages, b.clean_pages);
  EXPECT_EQ(a.pages, a.clean_pages);
  EXPECT_NE(b.pages, b.clean_pages);
}

TEST(Corpus, NoiseRate) {
  CorpusParams p;
  p.noise = 0.02;
  const auto c = generate_corpus(p);
  for (std::size_t i = 0; i < c.pages.size(); ++i) {
    std::size_t diff = 0;
    for (std::size_t k = 0; k < c.pages[i].pixels().size(); ++k) diff += c.pages[i].pixels()[k] != c.clean_pages[i].pixels()[k];
    const double rate = static_cast<double>(diff) / c.pages[i].pixels().size();
    EXPECT_NEAR(rate, 0.02, 0.005) << i;
  }
}

TEST(Corpus, SameSeedSameBytes) {
  CorpusParams p;
  p.noise = 0.02;
  p.seed = 9;
  const auto base = std::filesystem::temp_directory_path() / "palim_test_corpus";
  std::filesystem::remove_all(base);
  write_corpus(generate_corpus(p), base / "a");
  write_corpus(generate_corpus(p), base / "b");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(base / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), base / "a");
    ASSERT_EQ(slurp(e.path()), slurp(base / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 10u + 10u + 2u);
  p.seed = 10;
  write_corpus(generate_corpus(p), base / "c");
  EXPECT_NE(slurp(base / "a" / "groundtruth.tsv"), slurp(base / "c" / "groundtruth.tsv"));
  std::filesystem::remove_all(base);
}

TEST(Corpus, WrittenFilesParse) {
  const auto dir = std::filesystem::temp_directory_path() / "palim_test_corpus_files";
  std::filesystem::remove_all(dir);
  const auto c = generate_corpus({});
  write_corpus(c, dir);
  std::istringstream gt(slurp(dir / "groundtruth.tsv"));
  std::string line;
  std::getline(gt, line);
  EXPECT_EQ(line, "# word\tpage\tx\ty\tw\th");
  int rows = 0;
  while (std::getline(gt, line)) ++rows;
  EXPECT_EQ(rows, 30);
  EXPECT_EQ(load_image(dir / "pages" / (c.page_ids[0] + ".pgm")), c.pages[0]);
  std::filesystem::remove_all(dir);
}

TEST(Corpus, InvalidParams) {
  CorpusParams p;
  p.words = 0;
  EXPECT_EQ(test::error_code([&] { generate_corpus(p); }), ErrorCode::invalid_argument);
  p = {};
  p.noise = 1.0;
  EXPECT_EQ(test::error_code([&] { generate_corpus(p); }), ErrorCode::invalid_argument);
  p = {};
  p.words = 40;
  p.pages = 1;
  EXPECT_EQ(test::error_code([&] { generate_corpus(p); }), ErrorCode::invalid_argument);
}

TEST(DocumentSet, DeterministicAndDistinct) {
  const auto a = document_set(6, 5);
  const auto b = document_set(6, 5);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].width(), 512);
    for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_NE(a[i], a[j]);
  }
}
