#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "palim/corpus.hpp"
#include "palim/error.hpp"
#include "palim/image_io.hpp"

namespace palim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::string random_word(std::mt19937_64& rng, int min_len, int max_len) {
  std::string w(static_cast<std::size_t>(uniform_int(rng, min_len, max_len)), 'a');
  for (auto& c : w) c = static_cast<char>('a' + uniform_int(rng, 0, 25));
  return w;
}

void stamp(GrayImage& page, const BinaryImage& ink, int x, int y) {
  for (int yy = 0; yy < ink.height(); ++yy) {
    for (int xx = 0; xx < ink.width(); ++xx) {
      if (ink.get(xx, yy)) page.at(x + xx, y + yy) = 0;
    }
  }
}

// A different letter with the same inked width, so the word keeps its footprint.
char substitute(char c, std::mt19937_64& rng) {
  const int w = render_text(std::string(1, c), 1).width();
  std::vector<char> same;
  for (char o = 'a'; o <= 'z'; ++o) {
    if (o != c && render_text(std::string(1, o), 1).width() == w) same.push_back(o);
  }
  if (same.empty()) return static_cast<char>('a' + (c - 'a' + uniform_int(rng, 1, 25)) % 26);
  return same[rng() % same.size()];
}

struct Placement {
  std::size_t word;
  Box box;  // tight ink box
};

// Lays words out left to right, top to bottom; throws when the page overflows.
std::vector<Placement> lay_out(GrayImage& page, const std::vector<std::string>& words, int scale, int margin) {
  std::vector<Placement> out;
  const int pitch = kLinePitch * scale;
  const int gap = kWordGap * scale;
  int x = margin;
  int y = margin;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto ink = render_text(words[i], scale);
    if (ink.width() > page.width() - 2 * margin) throw_error(ErrorCode::invalid_argument, "word wider than the page");
    if (x > margin && x + ink.width() > page.width() - margin) {
      x = margin;
      y += pitch;
    }
    if (y + ink.height() > page.height() - margin) throw_error(ErrorCode::invalid_argument, "page overflow: too many words per page");
    stamp(page, ink, x, y);
    Box tb = tight_box(ink);
    tb.x += x;
    tb.y += y;
    out.push_back({i, tb});
    x += ink.width() + gap;
  }
  return out;
}

}  // namespace

PageSegmentParams corpus_segment_params(int scale) {
  PageSegmentParams p;
  p.smear.horizontal_gap = 10 * scale;
  p.smear.vertical_gap = 10 * scale;
  p.smear.min_component_area = static_cast<std::size_t>(scale * scale);
  p.line_gap = 1;
  p.word_gap = 5 * scale;
  return p;
}

GrayImage add_salt_pepper(const GrayImage& g, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw_error(ErrorCode::invalid_argument, "noise must be in [0, 1)");
  GrayImage out = g;
  std::mt19937_64 rng(seed);
  for (auto& v : out.pixels()) {
    if (uniform01(rng) < p) v = v < 128 ? 255 : 0;
  }
  return out;
}

Corpus generate_corpus(const CorpusParams& params) {
  if (params.words < 1 || params.repeats < 1) throw_error(ErrorCode::invalid_argument, "words and repeats must be >= 1");
  if (!(params.noise >= 0.0 && params.noise < 1.0)) throw_error(ErrorCode::invalid_argument, "noise must be in [0, 1)");
  if (params.scale < 1 || params.pages < 0 || params.words_per_page < 1) {
    throw_error(ErrorCode::invalid_argument, "invalid corpus layout parameters");
  }
  std::mt19937_64 rng(params.seed);
  Corpus c;

  std::set<std::string> query_set;
  while (static_cast<int>(c.query_words.size()) < params.words) {
    auto w = random_word(rng, 4, 7);
    if (query_set.insert(w).second) c.query_words.push_back(w);
  }
  for (const auto& w : c.query_words) {
    const auto ink = render_text(w, params.scale);
    c.queries.push_back(crop(ink, tight_box(ink)));
  }

  const int total = params.words * params.repeats;
  const int pages = params.pages > 0 ? params.pages : (total + 2) / 3;
  std::vector<int> slots;
  for (int w = 0; w < params.words; ++w) {
    for (int r = 0; r < params.repeats; ++r) slots.push_back(w);
  }
  shuffle(slots, rng);
  std::vector<std::vector<int>> per_page(static_cast<std::size_t>(pages));
  for (std::size_t i = 0; i < slots.size(); ++i) per_page[i % static_cast<std::size_t>(pages)].push_back(slots[i]);

  const std::uint64_t noise_seed = splitmix64(params.seed ^ 0x6e6f697365ULL);
  for (int p = 0; p < pages; ++p) {
    const auto& mine = per_page[static_cast<std::size_t>(p)];
    struct Item {
      std::string text;
      int query = -1;
    };
    std::vector<Item> items;
    for (int w : mine) items.push_back({c.query_words[static_cast<std::size_t>(w)], w});
    while (static_cast<int>(items.size()) < params.words_per_page) {
      std::string f;
      if (uniform01(rng) < params.confusable_fraction) {
        f = c.query_words[rng() % c.query_words.size()];
        const std::size_t pos = rng() % f.size();
        f[pos] = substitute(f[pos], rng);
      } else {
        f = random_word(rng, 3, 8);
      }
      if (!query_set.count(f)) items.push_back({f, -1});
    }
    shuffle(items, rng);

    GrayImage page(params.page_width, params.page_height, 255);
    std::vector<std::string> texts;
    for (const auto& it : items) texts.push_back(it.text);
    for (const auto& pl : lay_out(page, texts, params.scale, 16)) {
      const auto& it = items[pl.word];
      if (it.query >= 0) c.occurrences.push_back({it.text, p, pl.box});
    }
    char id[32];
    std::snprintf(id, sizeof id, "page_%03d", p);
    c.page_ids.emplace_back(id);
    c.pages.push_back(params.noise > 0.0 ? add_salt_pepper(page, params.noise, splitmix64(noise_seed + static_cast<std::uint64_t>(p)))
                                         : page);
    c.clean_pages.push_back(std::move(page));
  }
  return c;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "pages", ec);
  fs::create_directories(dir / "queries", ec);
  if (ec) throw_error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream manifest(dir / "manifest.tsv", std::ios::binary);
  std::ofstream gt(dir / "groundtruth.tsv", std::ios::binary);
  if (!manifest || !gt) throw_error(ErrorCode::io, "cannot write into " + dir.string());
  manifest << "# id\tpath\tlabel\n";
  for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
    const std::string rel = "pages/" + corpus.page_ids[i] + ".pgm";
    save_pgm(dir / rel, corpus.pages[i]);
    manifest << corpus.page_ids[i] << '\t' << rel << "\ttext\n";
  }
  gt << "# word\tpage\tx\ty\tw\th\n";
  for (const auto& o : corpus.occurrences) {
    gt << o.word << '\t' << corpus.page_ids[static_cast<std::size_t>(o.page)] << '\t' << o.box.x << '\t' << o.box.y
       << '\t' << o.box.w << '\t' << o.box.h << '\n';
  }
  for (std::size_t i = 0; i < corpus.queries.size(); ++i) {
    save_pgm(dir / "queries" / (corpus.query_words[i] + ".pgm"), render(corpus.queries[i]));
  }
  if (!manifest || !gt) throw_error(ErrorCode::io, "write failed in " + dir.string());
}

GrayImage text_page(const PageStyle& style, std::mt19937_64& rng) {
  if (style.scale < 1 || style.columns < 1 || style.line_pitch < kGlyphHeight) {
    throw_error(ErrorCode::invalid_argument, "invalid page style");
  }
  GrayImage page(style.width, style.height, 255);
  const int gutter = 8 * style.scale;
  const int text_w = style.width - 2 * style.margin;
  const int col_w = (text_w - (style.columns - 1) * gutter) / style.columns;
  const int line_w = std::max(1, static_cast<int>(col_w * style.line_fill));
  const int pitch = style.line_pitch * style.scale;
  const int gap = kWordGap * style.scale;
  int top = style.margin;

  if (style.figure) {
    const int fh = (style.height - 2 * style.margin) * 2 / 5;
    const int fw = text_w * 3 / 5;
    const int fx = style.margin + uniform_int(rng, 0, text_w - fw);
    const int thick = 2 * style.scale;
    for (int y = top; y < top + fh; ++y) {
      for (int x = fx; x < fx + fw; ++x) {
        if (y < top + thick || y >= top + fh - thick || x < fx + thick || x >= fx + fw - thick) page.at(x, y) = 0;
      }
    }
    const int blobs = uniform_int(rng, 4, 9);
    for (int b = 0; b < blobs; ++b) {
      const int r = uniform_int(rng, 4, fh / 5);
      const int cx = uniform_int(rng, fx + thick + r, fx + fw - thick - r - 1);
      const int cy = uniform_int(rng, top + thick + r, top + fh - thick - r - 1);
      for (int y = cy - r; y <= cy + r; ++y) {
        for (int x = cx - r; x <= cx + r; ++x) {
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) page.at(x, y) = 0;
        }
      }
    }
    top += fh + pitch;
  }

  for (int col = 0; col < style.columns; ++col) {
    const int left = style.margin + col * (col_w + gutter);
    for (int y = top; y + kGlyphHeight * style.scale <= style.height - style.margin; y += pitch) {
      int x = left;
      for (;;) {
        const auto ink = render_text(random_word(rng, 2, 9), style.scale);
        if (x + ink.width() > left + line_w) break;
        stamp(page, ink, x, y);
        x += ink.width() + gap;
      }
    }
  }
  return page;
}

std::vector<GrayImage> document_set(int n, std::uint64_t seed) {
  std::vector<GrayImage> out;
  out.reserve(static_cast<std::size_t>(std::max(0, n)));
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(i)));
    PageStyle s;
    s.scale = uniform_int(rng, 2, 3);
    s.margin = uniform_int(rng, 16, 40);
    s.line_pitch = uniform_int(rng, 10, 16);
    s.line_fill = 0.7 + 0.3 * uniform01(rng);
    s.columns = s.scale == 2 ? uniform_int(rng, 1, 2) : 1;
    s.figure = uniform01(rng) < 0.3;
    out.push_back(text_page(s, rng));
  }
  return out;
}

}  // namespace palim
