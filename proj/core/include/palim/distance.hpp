#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "palim/image.hpp"

namespace palim {

/// Squared Euclidean distance from every pixel to the nearest foreground pixel.
struct DistanceMap {
  static constexpr std::uint32_t kInfinite = std::numeric_limits<std::uint32_t>::max();

  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> sqdist;

  std::uint32_t at(int x, int y) const {
    return sqdist[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  /// True distance, or +inf when the source image had no foreground.
  double distance(int x, int y) const;
};

/// Exact squared EDT (Meijster, Roerdink & Hesselink two-pass scheme), O(W*H).
DistanceMap edm(const BinaryImage& b);

}  // namespace palim
