#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "palim/distance.hpp"
#include "palim/image.hpp"

namespace palim {

/// Symmetric difference of two equally sized foreground sets.
BinaryImage xor_diff(const BinaryImage& a, const BinaryImage& b);

/// Error pixels of xor_diff(query, reference), each weighted by its distance to
/// the nearest ink of the image it is missing from.
struct ErrorReport {
  static constexpr std::size_t kHistogramBuckets = 17;  // [k, k+1) for k < 16, then [16, inf)

  std::size_t error_pixel_count = 0;
  double sum_distance = 0.0;
  double mean_distance = 0.0;
  double max_distance = 0.0;
  std::vector<std::size_t> histogram = std::vector<std::size_t>(kHistogramBuckets, 0);
  /// sum_distance / max(1, reference ink count)
  double scalar = 0.0;
  /// Per error pixel in raster order.
  std::vector<float> pixel_distances;
};

/// Spurious query ink is measured against the reference's distance map and
/// missing reference ink against the query's. When the image an error pixel
/// is measured against has no ink at all, the image diagonal is used.
ErrorReport edm_error(const BinaryImage& query, const BinaryImage& reference);

/// `key=value` lines, newline-terminated.
std::string to_key_values(const ErrorReport& report);

struct Profile {
  std::vector<int> columns;
  int height = 0;
};

Profile vertical_profile(const BinaryImage& b);

/// Area-preserving resampling of a piecewise-constant signal to `length` bins.
std::vector<double> resample_profile(const std::vector<double>& values, std::size_t length);

/// Mean absolute difference of the height-normalized profiles, both resampled
/// to the longer length.
double profile_distance(const Profile& p, const Profile& q);

/// Tight-crops both images and centers each on a canvas the size of the union
/// of their bounding boxes, so they can be compared pixel by pixel.
std::pair<BinaryImage, BinaryImage> align_pair(const BinaryImage& a, const BinaryImage& b);

}  // namespace palim
