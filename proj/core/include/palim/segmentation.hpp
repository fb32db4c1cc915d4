#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "palim/image.hpp"

namespace palim {

/// Intensity classes of a page. Class ids are ordered by ascending center, so
/// class 0 is always the darkest.
struct ClassMap {
  int width = 0;
  int height = 0;
  int k = 0;
  std::vector<std::uint8_t> labels;
  std::vector<double> centers;
  int iterations = 0;
  double sse = 0.0;
  /// SSE after each assignment pass; nonincreasing.
  std::vector<double> sse_trace;
};

/// Lloyd's algorithm on pixel intensities, initialized at the k evenly spaced
/// histogram quantiles. `seed` only drives re-seeding of clusters that empty out.
ClassMap kmeans_classes(const GrayImage& g, int k, int max_iter = 100, std::uint64_t seed = 0);

BinaryImage class_layer(const ClassMap& cm, int class_id);

struct Component {
  Box box;
  std::size_t area = 0;
};

/// 8-connected components; `labels` holds 0 for background and i + 1 for components[i].
struct ComponentMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;
  std::vector<Component> components;
};

ComponentMap connected_components(const BinaryImage& b);

BinaryImage remove_small_components(const BinaryImage& b, std::size_t min_area);

/// Run-length smearing: background runs of at most `gap` pixels enclosed by ink
/// on both sides become ink.
BinaryImage smear_horizontal(const BinaryImage& b, int gap);
BinaryImage smear_vertical(const BinaryImage& b, int gap);

enum class BlockKind { text, other };

struct Block {
  Box box;
  BlockKind kind = BlockKind::text;
  double ink_density = 0.0;
};

struct SmearParams {
  int horizontal_gap = 20;
  int vertical_gap = 20;
  /// Components smaller than this are ignored when locating blocks.
  std::size_t min_component_area = 0;
};

/// Horizontal then vertical smearing, connected components of the result, and
/// merging of overlapping boxes. Sorted top-to-bottom, then left-to-right.
std::vector<Block> extract_text_blocks(const BinaryImage& b, const SmearParams& params = {});

/// A run of columns [begin, end); separators are runs of >= gap empty columns.
struct ColumnSpan {
  int begin = 0;
  int end = 0;
  bool separator = false;
};

/// Partitions [0, columns.size()) into alternating spans.
std::vector<ColumnSpan> column_segments(const std::vector<int>& columns, int gap);

struct Pseudoword {
  Box box;  // in the coordinates of the image that was segmented
  BinaryImage pixels;
};

std::vector<Pseudoword> segment_pseudowords(const BinaryImage& crop, int gap);

/// As above, but column spans and tight boxes come from `geometry` while the
/// crops are cut from `pixels` (the two images share dimensions).
std::vector<Pseudoword> segment_pseudowords(const BinaryImage& geometry, const BinaryImage& pixels, int gap);

/// Horizontal text bands separated by >= min_gap empty rows, tight vertically
/// and spanning the full width.
std::vector<Box> segment_lines(const BinaryImage& crop, int min_gap = 1);

struct PageSegmentParams {
  SmearParams smear;
  int line_gap = 1;
  int word_gap = 10;
};

/// Blocks, then lines, then pseudowords; boxes in page coordinates, reading order.
std::vector<Pseudoword> page_pseudowords(const BinaryImage& page, const PageSegmentParams& params = {});

}  // namespace palim
