#include "palim/distance.hpp"

#include <cmath>

namespace palim {

double DistanceMap::distance(int x, int y) const {
  const auto d = at(x, y);
  return d == kInfinite ? std::numeric_limits<double>::infinity() : std::sqrt(static_cast<double>(d));
}

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

DistanceMap edm(const BinaryImage& b) {
  DistanceMap out;
  out.width = b.width();
  out.height = b.height();
  const auto w = static_cast<std::size_t>(b.width());
  const auto h = static_cast<std::size_t>(b.height());
  if (b.count() == 0) {
    out.sqdist.assign(w * h, DistanceMap::kInfinite);
    return out;
  }

  // Phase 1: vertical distance to the nearest foreground pixel in each column.
  const long long inf = static_cast<long long>(w + h);
  std::vector<long long> g(w * h);
  auto bits = b.bits();
  for (std::size_t x = 0; x < w; ++x) {
    g[x] = bits[x] ? 0 : inf;
    for (std::size_t y = 1; y < h; ++y) {
      const auto i = y * w + x;
      g[i] = bits[i] ? 0 : g[i - w] + 1;
    }
    for (std::size_t y = h - 1; y-- > 0;) {
      const auto i = y * w + x;
      if (g[i + w] < g[i]) g[i] = g[i + w] + 1;
    }
  }

  // Phase 2: lower envelope of the parabolas (x - i)^2 + g(i)^2 along each row.
  out.sqdist.resize(w * h);
  std::vector<long long> s(w);
  std::vector<long long> t(w);
  const auto m = static_cast<long long>(w);
  for (std::size_t y = 0; y < h; ++y) {
    const long long* row = g.data() + y * w;
    auto f = [row](long long x, long long i) { return (x - i) * (x - i) + row[i] * row[i]; };
    auto sep = [row](long long i, long long u) {
      return floor_div(u * u - i * i + row[u] * row[u] - row[i] * row[i], 2 * (u - i));
    };

    long long q = 0;
    s[0] = 0;
    t[0] = 0;
    for (long long u = 1; u < m; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const long long wsep = 1 + sep(s[q], u);
        if (wsep < m) {
          ++q;
          s[q] = u;
          t[q] = wsep;
        }
      }
    }
    for (long long u = m - 1; u >= 0; --u) {
      out.sqdist[y * w + static_cast<std::size_t>(u)] = static_cast<std::uint32_t>(f(u, s[q]));
      if (u == t[q]) --q;
    }
  }
  return out;
}

}  // namespace palim
