#pragma once

// Generators and brute-force reference implementations shared by the tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "palim/image.hpp"

namespace palim::test {

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline BinaryImage random_binary(std::mt19937_64& rng, int w, int h, double density) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (auto& b : bits) b = uniform01(rng) < density ? 1 : 0;
  return BinaryImage(w, h, std::move(bits));
}

inline GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(pick(rng, 256));
  return GrayImage(w, h, std::move(px));
}

/// O(n^2) nearest-foreground scan; UINT32_MAX everywhere when there is no ink.
inline std::vector<std::uint32_t> brute_sqdist(const BinaryImage& b) {
  std::vector<std::pair<int, int>> ink;
  for (int y = 0; y < b.height(); ++y)
    for (int x = 0; x < b.width(); ++x)
      if (b.get(x, y)) ink.emplace_back(x, y);
  std::vector<std::uint32_t> out(static_cast<std::size_t>(b.width()) * b.height(),
                                 std::numeric_limits<std::uint32_t>::max());
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) {
      std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
      for (auto [ix, iy] : ink) {
        const auto d = static_cast<std::uint32_t>((x - ix) * (x - ix) + (y - iy) * (y - iy));
        best = std::min(best, d);
      }
      out[static_cast<std::size_t>(y) * b.width() + x] = best;
    }
  }
  return out;
}

/// Between-class variance w0*w1*(mu0-mu1)^2 for the split {v < t} / {v >= t},
/// recounted from the pixels; 0 when a class is empty.
inline double between_class_variance(const GrayImage& g, int t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (auto v : g.pixels()) {
    if (v < t) {
      n0 += 1;
      s0 += v;
    } else {
      n1 += 1;
      s1 += v;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double d = s0 / n0 - s1 / n1;
  return n0 * n1 * d * d;
}

/// Level-`level` Sierpinski carpet on a 3^level grid, built from base-3 digits.
inline BinaryImage sierpinski_carpet(int level) {
  int side = 1;
  for (int i = 0; i < level; ++i) side *= 3;
  BinaryImage b(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      bool hole = false;
      for (int a = x, c = y; a > 0 || c > 0; a /= 3, c /= 3)
        if (a % 3 == 1 && c % 3 == 1) hole = true;
      b.set(x, y, !hole);
    }
  }
  return b;
}

/// Occupied r x r cells, counted cell by cell.
inline long long occupied_cells(const BinaryImage& b, int r) {
  long long n = 0;
  for (int cy = 0; cy < b.height(); cy += r) {
    for (int cx = 0; cx < b.width(); cx += r) {
      bool any = false;
      for (int y = cy; y < std::min(cy + r, b.height()) && !any; ++y)
        for (int x = cx; x < std::min(cx + r, b.width()) && !any; ++x) any = b.get(x, y);
      n += any ? 1 : 0;
    }
  }
  return n;
}

/// Slope of least squares through (x_i, y_i), computed with long double sums.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return static_cast<double>(sxy / sxx);
}

/// r(n) recounted from scratch for every cutoff.
struct RecountPoint {
  int n;
  int r;
};
inline std::vector<RecountPoint> recount_curve(const std::vector<std::string>& ranking,
                                               const std::set<std::string>& relevant) {
  std::vector<RecountPoint> out;
  for (std::size_t n = 1; n <= ranking.size(); ++n) {
    int r = 0;
    for (std::size_t i = 0; i < n; ++i) r += relevant.count(ranking[i]) ? 1 : 0;
    out.push_back({static_cast<int>(n), r});
  }
  return out;
}

/// Ink pixels of `b` as a string of '#' and '.', one row per line.
inline std::string ascii(const BinaryImage& b) {
  std::string s;
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) s += b.get(x, y) ? '#' : '.';
    s += '\n';
  }
  return s;
}

inline BinaryImage from_ascii(const std::vector<std::string>& rows) {
  BinaryImage b(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (std::size_t y = 0; y < rows.size(); ++y)
    for (std::size_t x = 0; x < rows[y].size(); ++x) b.set(static_cast<int>(x), static_cast<int>(y), rows[y][x] == '#');
  return b;
}

}  // namespace palim::test
