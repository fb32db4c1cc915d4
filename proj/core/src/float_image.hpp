#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "palim/image.hpp"
#include "palim/keypoints.hpp"

namespace palim::detail {

struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  FloatImage() = default;
  FloatImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  float at(int x, int y) const { return px[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  float& at(int x, int y) { return px[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  float clamped(int x, int y) const { return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1)); }
};

/// Intensities scaled to [0, 1].
FloatImage to_float(const GrayImage& g);

/// Separable Gaussian, kernel radius ceil(4 sigma), replicated borders.
FloatImage gaussian_blur(const FloatImage& img, double sigma);

/// Keeps every other pixel: dst(x, y) = src(2x, 2y).
FloatImage downsample(const FloatImage& img);

FloatImage upsample_bilinear(const FloatImage& img);

FloatImage crop(const FloatImage& img, int x, int y, int w, int h);

/// Descriptor of a keypoint on an already-blurred level. `x`, `y`, `sigma`
/// are in that level's pixel units.
void describe_on_level(const FloatImage& level, double x, double y, double sigma, double angle, float* out);

/// Detection plus optional description on the detector's own pyramid. Keypoints
/// are ordered by decreasing response, then position; `max_keypoints` 0 keeps all.
Features sift_features(const GrayImage& g, const SiftParams& p, std::size_t max_keypoints, bool describe);

}  // namespace palim::detail
