#include "palim/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "palim/error.hpp"

namespace palim {

namespace {

// Nearest center per intensity; centers sorted ascending so ties go to the lower id.
std::array<int, 256> assign(const std::array<std::size_t, 256>& hist, const std::vector<double>& centers) {
  std::array<int, 256> out{};
  for (int v = 0; v < 256; ++v) {
    if (hist[static_cast<std::size_t>(v)] == 0) continue;
    int best = 0;
    double best_d = std::abs(v - centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double d = std::abs(v - centers[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(v)] = best;
  }
  return out;
}

double sse_of(const std::array<std::size_t, 256>& hist, const std::array<int, 256>& labels,
              const std::vector<double>& centers) {
  double sse = 0.0;
  for (int v = 0; v < 256; ++v) {
    const auto n = hist[static_cast<std::size_t>(v)];
    if (n == 0) continue;
    const double d = v - centers[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];
    sse += static_cast<double>(n) * d * d;
  }
  return sse;
}

}  // namespace

ClassMap kmeans_classes(const GrayImage& g, int k, int max_iter, std::uint64_t seed) {
  if (k < 1 || k > 16) throw_error(ErrorCode::invalid_argument, "k must be in 1..16");
  if (max_iter < 1) throw_error(ErrorCode::invalid_argument, "max_iter must be >= 1");

  std::array<std::size_t, 256> hist{};
  for (auto v : g.pixels()) ++hist[v];
  std::vector<int> distinct;
  for (int v = 0; v < 256; ++v) {
    if (hist[static_cast<std::size_t>(v)]) distinct.push_back(v);
  }
  if (static_cast<std::size_t>(k) > distinct.size()) {
    throw_error(ErrorCode::invalid_argument, "k=" + std::to_string(k) + " exceeds the " +
                                                 std::to_string(distinct.size()) + " distinct intensities");
  }

  // Evenly spaced quantiles; when they collide fall back to evenly spaced distinct values.
  const double total = static_cast<double>(g.pixels().size());
  std::vector<double> centers;
  for (int j = 0; j < k; ++j) {
    const double target = (j + 0.5) / k * total;
    double cum = 0.0;
    for (int v = 0; v < 256; ++v) {
      cum += static_cast<double>(hist[static_cast<std::size_t>(v)]);
      if (cum >= target) {
        centers.push_back(v);
        break;
      }
    }
  }
  if (std::adjacent_find(centers.begin(), centers.end()) != centers.end()) {
    const double d = static_cast<double>(distinct.size());
    for (int j = 0; j < k; ++j) {
      const auto idx = static_cast<std::size_t>(std::lround((j + 0.5) * d / k - 0.5));
      centers[static_cast<std::size_t>(j)] = distinct[std::min(idx, distinct.size() - 1)];
    }
  }

  std::mt19937_64 rng(seed);
  ClassMap cm;
  cm.width = g.width();
  cm.height = g.height();
  cm.k = k;

  auto update = [&](const std::array<int, 256>& labels) {
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<double> cnt(static_cast<std::size_t>(k), 0.0);
    for (int v = 0; v < 256; ++v) {
      const auto n = hist[static_cast<std::size_t>(v)];
      if (!n) continue;
      const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(v)]);
      sum[c] += static_cast<double>(n) * v;
      cnt[c] += static_cast<double>(n);
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (cnt[c] > 0) {
        centers[c] = sum[c] / cnt[c];
        continue;
      }
      // Empty cluster: re-seed at an intensity drawn proportional to its squared error.
      std::vector<double> weight(256, 0.0);
      double wsum = 0.0;
      for (int v = 0; v < 256; ++v) {
        const auto n = hist[static_cast<std::size_t>(v)];
        if (!n) continue;
        const double d = v - centers[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];
        weight[static_cast<std::size_t>(v)] = static_cast<double>(n) * d * d;
        wsum += weight[static_cast<std::size_t>(v)];
      }
      if (wsum <= 0.0) continue;
      const double pick = static_cast<double>(rng() >> 11) * 0x1.0p-53 * wsum;
      double acc = 0.0;
      for (int v = 0; v < 256; ++v) {
        acc += weight[static_cast<std::size_t>(v)];
        if (acc >= pick && weight[static_cast<std::size_t>(v)] > 0) {
          centers[c] = v;
          break;
        }
      }
    }
    std::sort(centers.begin(), centers.end());
  };

  std::array<int, 256> labels{};
  for (int it = 0; it < max_iter; ++it) {
    const auto next = assign(hist, centers);
    cm.sse_trace.push_back(sse_of(hist, next, centers));
    ++cm.iterations;
    if (it > 0 && next == labels) break;
    labels = next;
    update(labels);
  }
  // Centers are the means of the final assignment in every exit path.
  labels = assign(hist, centers);
  update(labels);
  labels = assign(hist, centers);

  cm.centers = centers;
  cm.sse = sse_of(hist, labels, centers);
  cm.labels.resize(g.pixels().size());
  std::transform(g.pixels().begin(), g.pixels().end(), cm.labels.begin(),
                 [&](std::uint8_t v) { return static_cast<std::uint8_t>(labels[v]); });
  return cm;
}

BinaryImage class_layer(const ClassMap& cm, int class_id) {
  if (class_id < 0 || class_id >= cm.k) {
    throw_error(ErrorCode::invalid_argument, "class id " + std::to_string(class_id) + " out of range");
  }
  std::vector<std::uint8_t> bits(cm.labels.size());
  std::transform(cm.labels.begin(), cm.labels.end(), bits.begin(),
                 [class_id](std::uint8_t l) -> std::uint8_t { return l == class_id ? 1 : 0; });
  return BinaryImage(cm.width, cm.height, std::move(bits));
}

ComponentMap connected_components(const BinaryImage& b) {
  ComponentMap out;
  out.width = b.width();
  out.height = b.height();
  out.labels.assign(b.bits().size(), 0);
  const int w = b.width();
  const int h = b.height();
  std::vector<std::size_t> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const auto i0 = static_cast<std::size_t>(y0) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x0);
      if (!b.bits()[i0] || out.labels[i0]) continue;
      const auto id = static_cast<std::int32_t>(out.components.size() + 1);
      Component comp;
      int minx = x0, maxx = x0, miny = y0, maxy = y0;
      out.labels[i0] = id;
      stack.push_back(i0);
      while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        ++comp.area;
        const int x = static_cast<int>(i % static_cast<std::size_t>(w));
        const int y = static_cast<int>(i / static_cast<std::size_t>(w));
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        for (int dy = -1; dy <= 1; ++dy) {
          const int ny = y + dy;
          if (ny < 0 || ny >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            if (nx < 0 || nx >= w) continue;
            const auto j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
            if (b.bits()[j] && !out.labels[j]) {
              out.labels[j] = id;
              stack.push_back(j);
            }
          }
        }
      }
      comp.box = {minx, miny, maxx - minx + 1, maxy - miny + 1};
      out.components.push_back(comp);
    }
  }
  return out;
}

BinaryImage remove_small_components(const BinaryImage& b, std::size_t min_area) {
  if (min_area <= 1) return b;
  const auto cc = connected_components(b);
  std::vector<std::uint8_t> bits(b.bits().size(), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto l = cc.labels[i];
    if (l && cc.components[static_cast<std::size_t>(l - 1)].area >= min_area) bits[i] = 1;
  }
  return BinaryImage(b.width(), b.height(), std::move(bits));
}

namespace {

// Fills enclosed background runs of length <= gap along one line of `n` samples.
template <typename Get, typename Set>
void smear_line(int n, int gap, Get get, Set set) {
  int last_ink = -1;
  for (int i = 0; i < n; ++i) {
    if (!get(i)) continue;
    if (last_ink >= 0 && i - last_ink - 1 > 0 && i - last_ink - 1 <= gap) {
      for (int j = last_ink + 1; j < i; ++j) set(j);
    }
    last_ink = i;
  }
}

}  // namespace

BinaryImage smear_horizontal(const BinaryImage& b, int gap) {
  BinaryImage out = b;
  for (int y = 0; y < b.height(); ++y) {
    smear_line(
        b.width(), gap, [&](int x) { return b.get(x, y); }, [&](int x) { out.set(x, y, true); });
  }
  return out;
}

BinaryImage smear_vertical(const BinaryImage& b, int gap) {
  BinaryImage out = b;
  for (int x = 0; x < b.width(); ++x) {
    smear_line(
        b.height(), gap, [&](int y) { return b.get(x, y); }, [&](int y) { out.set(x, y, true); });
  }
  return out;
}

std::vector<Block> extract_text_blocks(const BinaryImage& b, const SmearParams& params) {
  if (params.horizontal_gap < 0 || params.vertical_gap < 0) {
    throw_error(ErrorCode::invalid_argument, "smear gaps must be >= 0");
  }
  const auto geometry = remove_small_components(b, params.min_component_area);
  if (geometry.count() == 0) return {};
  const auto smeared = smear_vertical(smear_horizontal(geometry, params.horizontal_gap), params.vertical_gap);
  const auto cc = connected_components(smeared);

  std::vector<Box> boxes;
  for (const auto& c : cc.components) boxes.push_back(c.box);
  // Merge until no two boxes overlap, so every ink pixel lies in exactly one box.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < boxes.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (intersects(boxes[i], boxes[j])) {
          boxes[i] = unite(boxes[i], boxes[j]);
          boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& c) {
    return a.y != c.y ? a.y < c.y : a.x < c.x;
  });

  std::vector<Block> blocks;
  for (const auto& box : boxes) {
    std::size_t ink = 0;
    for (int y = box.y; y < box.bottom(); ++y) {
      for (int x = box.x; x < box.right(); ++x) ink += b.get(x, y) ? 1 : 0;
    }
    Block blk;
    blk.box = box;
    blk.ink_density = static_cast<double>(ink) / static_cast<double>(box.area());
    blk.kind = (blk.ink_density >= 0.02 && blk.ink_density <= 0.9) ? BlockKind::text : BlockKind::other;
    blocks.push_back(blk);
  }
  return blocks;
}

std::vector<ColumnSpan> column_segments(const std::vector<int>& columns, int gap) {
  if (gap < 1) throw_error(ErrorCode::invalid_argument, "gap must be >= 1");
  std::vector<ColumnSpan> spans;
  const int n = static_cast<int>(columns.size());
  int start = 0;  // start of the current non-separator span
  int i = 0;
  while (i < n) {
    if (columns[static_cast<std::size_t>(i)] != 0) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && columns[static_cast<std::size_t>(j)] == 0) ++j;
    if (j - i >= gap) {
      if (i > start) spans.push_back({start, i, false});
      spans.push_back({i, j, true});
      start = j;
    }
    i = j;
  }
  if (start < n) spans.push_back({start, n, false});
  return spans;
}

std::vector<Pseudoword> segment_pseudowords(const BinaryImage& crop, int gap) {
  return segment_pseudowords(crop, crop, gap);
}

std::vector<Pseudoword> segment_pseudowords(const BinaryImage& geometry, const BinaryImage& pixels, int gap) {
  if (geometry.width() != pixels.width() || geometry.height() != pixels.height()) {
    throw_error(ErrorCode::invalid_argument, "dimension mismatch");
  }
  std::vector<int> columns(static_cast<std::size_t>(geometry.width()), 0);
  for (int y = 0; y < geometry.height(); ++y) {
    for (int x = 0; x < geometry.width(); ++x) columns[static_cast<std::size_t>(x)] += geometry.get(x, y) ? 1 : 0;
  }
  std::vector<Pseudoword> out;
  for (const auto& span : column_segments(columns, gap)) {
    if (span.separator) continue;
    int x0 = span.end, x1 = -1, y0 = geometry.height(), y1 = -1;
    for (int x = span.begin; x < span.end; ++x) {
      if (!columns[static_cast<std::size_t>(x)]) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      for (int y = 0; y < geometry.height(); ++y) {
        if (geometry.get(x, y)) {
          y0 = std::min(y0, y);
          y1 = std::max(y1, y);
        }
      }
    }
    if (x1 < 0) continue;
    const Box box{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    out.push_back({box, crop(pixels, box)});
  }
  return out;
}

std::vector<Box> segment_lines(const BinaryImage& crop, int min_gap) {
  if (min_gap < 1) throw_error(ErrorCode::invalid_argument, "line gap must be >= 1");
  std::vector<int> rows(static_cast<std::size_t>(crop.height()), 0);
  for (int y = 0; y < crop.height(); ++y) {
    for (int x = 0; x < crop.width(); ++x) rows[static_cast<std::size_t>(y)] += crop.get(x, y) ? 1 : 0;
  }
  std::vector<Box> lines;
  for (const auto& span : column_segments(rows, min_gap)) {
    if (span.separator) continue;
    int y0 = span.begin;
    int y1 = span.end;
    while (y0 < y1 && rows[static_cast<std::size_t>(y0)] == 0) ++y0;
    while (y1 > y0 && rows[static_cast<std::size_t>(y1 - 1)] == 0) --y1;
    if (y1 > y0) lines.push_back({0, y0, crop.width(), y1 - y0});
  }
  return lines;
}

std::vector<Pseudoword> page_pseudowords(const BinaryImage& page, const PageSegmentParams& params) {
  const auto geometry = remove_small_components(page, params.smear.min_component_area);
  SmearParams smear = params.smear;
  smear.min_component_area = 0;
  std::vector<Pseudoword> out;
  for (const auto& block : extract_text_blocks(geometry, smear)) {
    const auto geo_block = crop(geometry, block.box);
    const auto pix_block = crop(page, block.box);
    for (const auto& line : segment_lines(geo_block, params.line_gap)) {
      for (auto& pw : segment_pseudowords(crop(geo_block, line), crop(pix_block, line), params.word_gap)) {
        pw.box.x += block.box.x + line.x;
        pw.box.y += block.box.y + line.y;
        out.push_back(std::move(pw));
      }
    }
  }
  return out;
}

}  // namespace palim
