#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "palim/image.hpp"

namespace palim {

struct KeyPoint {
  float x = 0.0f;  // full-resolution pixel coordinates, subpixel
  float y = 0.0f;
  float scale = 1.0f;        // Gaussian sigma in pixels
  float orientation = 0.0f;  // radians in [0, 2*pi), image axes (y points down)
  float response = 0.0f;

  friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

inline constexpr std::size_t kDescriptorSize = 128;
/// 4 x 4 spatial cells x 8 orientation bins, unit L2 norm.
using Descriptor = std::array<float, kDescriptorSize>;

struct Match {
  int index_a = 0;
  int index_b = 0;
  float distance = 0.0f;
  float ratio = 0.0f;  // best / second-best distance
};

struct HarrisParams {
  double k = 0.04;
  double sigma = 1.5;       // Gaussian integration window of the structure tensor
  double threshold = 0.01;  // fraction of the strongest positive response
  int nms_radius = 3;
};

/// Harris-Stephens corners: R = det(M) - k trace(M)^2, local maxima above the
/// threshold. Keypoints carry scale 1 and orientation 0.
std::vector<KeyPoint> harris(const GrayImage& g, const HarrisParams& params = {});

/// Harris response field, row-major, for inspection and tests.
std::vector<float> harris_response(const GrayImage& g, const HarrisParams& params = {});

struct SiftParams {
  int octaves = 0;  // 0: as many as keep the smallest octave >= 16 px
  int scales_per_octave = 3;
  double sigma0 = 1.6;
  double contrast_threshold = 0.03;  // on |DoG| at the refined extremum, intensities in [0, 1]
  double edge_threshold = 10.0;
  bool upsample = false;  // double the input before building the pyramid
};

/// Difference-of-Gaussians extrema with quadratic refinement, contrast and
/// edge rejection, and one keypoint per dominant orientation.
std::vector<KeyPoint> sift_detect(const GrayImage& g, const SiftParams& params = {});

/// Gradient-orientation histogram around `kp`, rotated to its orientation.
/// Samples outside the image are clamped to the border.
Descriptor sift_describe(const GrayImage& g, const KeyPoint& kp);

enum class Detector { sift, harris };

std::string_view to_string(Detector d);
std::optional<Detector> parse_detector(std::string_view name);

struct FeatureParams {
  Detector detector = Detector::sift;
  SiftParams sift;
  HarrisParams harris;
  /// Keep the strongest keypoints only; 0 keeps all.
  std::size_t max_keypoints = 500;
};

struct Features {
  std::vector<KeyPoint> keypoints;
  std::vector<Descriptor> descriptors;
  friend bool operator==(const Features&, const Features&) = default;
};

/// Detection and description in one pass (descriptors are computed on the
/// detector's own scale space).
Features extract_features(const GrayImage& g, const FeatureParams& params = {});

struct MatchMode {
  enum class Kind { ratio, threshold };
  Kind kind = Kind::ratio;
  double limit = 0.8;  // ratio limit, or distance threshold
  bool cross_check = false;

  static MatchMode ratio(double r = 0.8) { return {Kind::ratio, r, false}; }
  static MatchMode threshold(double t) { return {Kind::threshold, t, false}; }
};

/// Nearest and second-nearest neighbor of every descriptor of `a` in `b`; at
/// most one match per query descriptor.
std::vector<Match> match_descriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                     const MatchMode& mode = {});

/// Distinct points of B taking part in `matches`.
std::size_t matched_points(const std::vector<Match>& matches);
/// matched_points / max(1, min(|A|, |B|)), so several A points sharing one
/// partner count once.
double match_score(const Features& a, const Features& b, const MatchMode& mode = {});

double match_score(const GrayImage& a, const GrayImage& b, const FeatureParams& params = {},
                   const MatchMode& mode = {});

}  // namespace palim
