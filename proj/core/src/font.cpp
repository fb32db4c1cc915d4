#include <algorithm>

#include "palim/corpus.hpp"
#include "palim/error.hpp"

namespace palim {

namespace {

using Glyph = std::array<std::uint8_t, kGlyphHeight>;

constexpr std::uint8_t row(const char (&s)[6]) {
  std::uint8_t v = 0;
  for (int i = 0; i < 5; ++i) v = static_cast<std::uint8_t>((v << 1) | (s[i] == '#' ? 1 : 0));
  return v;
}

constexpr Glyph g(const char (&r0)[6], const char (&r1)[6], const char (&r2)[6], const char (&r3)[6],
                  const char (&r4)[6], const char (&r5)[6], const char (&r6)[6]) {
  return {row(r0), row(r1), row(r2), row(r3), row(r4), row(r5), row(r6)};
}

constexpr std::array<Glyph, 26> kLower = {
    g(".....", ".....", ".###.", "....#", ".####", "#...#", ".####"),  // a
    g("#....", "#....", "#.##.", "##..#", "#...#", "#...#", "####."),  // b
    g(".....", ".....", ".###.", "#....", "#....", "#...#", ".###."),  // c
    g("....#", "....#", ".##.#", "#..##", "#...#", "#...#", ".####"),  // d
    g(".....", ".....", ".###.", "#...#", "#####", "#....", ".###."),  // e
    g("..##.", ".#..#", ".#...", "###..", ".#...", ".#...", ".#..."),  // f
    g(".....", ".####", "#...#", "#...#", ".####", "....#", ".###."),  // g
    g("#....", "#....", "#.##.", "##..#", "#...#", "#...#", "#...#"),  // h
    g("..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###."),  // i
    g("...#.", ".....", "..##.", "...#.", "...#.", "#..#.", ".##.."),  // j
    g("#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."),  // k
    g(".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),  // l
    g(".....", ".....", "##.#.", "#.#.#", "#.#.#", "#...#", "#...#"),  // m
    g(".....", ".....", "#.##.", "##..#", "#...#", "#...#", "#...#"),  // n
    g(".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###."),  // o
    g(".....", ".....", "####.", "#...#", "####.", "#....", "#...."),  // p
    g(".....", ".....", ".##.#", "#..##", ".####", "....#", "....#"),  // q
    g(".....", ".....", "#.##.", "##..#", "#....", "#....", "#...."),  // r
    g(".....", ".....", ".###.", "#....", ".###.", "....#", "####."),  // s
    g(".#...", ".#...", "###..", ".#...", ".#...", ".#..#", "..##."),  // t
    g(".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#"),  // u
    g(".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#.."),  // v
    g(".....", ".....", "#...#", "#...#", "#.#.#", "#.#.#", ".#.#."),  // w
    g(".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#"),  // x
    g(".....", ".....", "#...#", "#...#", ".####", "....#", ".###."),  // y
    g(".....", ".....", "#####", "...#.", "..#..", ".#...", "#####"),  // z
};

constexpr std::array<Glyph, 10> kDigits = {
    g(".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),  // 0
    g("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),  // 1
    g(".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),  // 2
    g("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),  // 3
    g("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),  // 4
    g("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),  // 5
    g("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),  // 6
    g("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),  // 7
    g(".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),  // 8
    g(".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),  // 9
};

// Inclusive range of inked columns.
std::pair<int, int> ink_columns(const Glyph& gl) {
  std::uint8_t any = 0;
  for (auto r : gl) any = static_cast<std::uint8_t>(any | r);
  int first = 0;
  while (!(any & (0x10 >> first))) ++first;
  int last = kGlyphWidth - 1;
  while (!(any & (0x10 >> last))) --last;
  return {first, last};
}

}  // namespace

const std::array<std::uint8_t, kGlyphHeight>* glyph(char c) {
  if (c >= 'a' && c <= 'z') return &kLower[static_cast<std::size_t>(c - 'a')];
  if (c >= '0' && c <= '9') return &kDigits[static_cast<std::size_t>(c - '0')];
  return nullptr;
}

BinaryImage render_text(std::string_view text, int scale) {
  if (scale < 1) throw_error(ErrorCode::invalid_argument, "scale must be >= 1");
  // First pass: font-pixel x offsets.
  std::vector<std::pair<const Glyph*, int>> placed;
  int x = 0;
  bool need_spacing = false;
  for (char c : text) {
    if (c == ' ') {
      x += kWordGap;
      need_spacing = false;
      continue;
    }
    const Glyph* gl = glyph(c);
    if (!gl) throw_error(ErrorCode::invalid_argument, std::string("no glyph for character '") + c + "'");
    const auto [first, last] = ink_columns(*gl);
    if (need_spacing) x += 1;
    placed.emplace_back(gl, x - first);
    x += last - first + 1;
    need_spacing = true;
  }
  BinaryImage out(std::max(1, x) * scale, kGlyphHeight * scale);
  for (const auto& [gl, gx] : placed) {
    for (int r = 0; r < kGlyphHeight; ++r) {
      for (int c = 0; c < kGlyphWidth; ++c) {
        if (!((*gl)[static_cast<std::size_t>(r)] & (0x10 >> c))) continue;
        for (int dy = 0; dy < scale; ++dy) {
          for (int dx = 0; dx < scale; ++dx) out.set((gx + c) * scale + dx, r * scale + dy, true);
        }
      }
    }
  }
  return out;
}

}  // namespace palim
