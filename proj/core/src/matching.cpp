#include <algorithm>
#include <cmath>
#include <limits>

#include "float_image.hpp"
#include "palim/error.hpp"
#include "palim/keypoints.hpp"

namespace palim {

namespace {

float squared_l2(const Descriptor& a, const Descriptor& b) {
  std::array<float, 8> acc{};
  for (std::size_t i = 0; i < kDescriptorSize; i += 8) {
    for (std::size_t j = 0; j < 8; ++j) {
      const float d = a[i + j] - b[i + j];
      acc[j] += d * d;
    }
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

struct Nearest {
  int best = -1;
  float d1 = std::numeric_limits<float>::infinity();
  float d2 = std::numeric_limits<float>::infinity();
};

Nearest nearest(const Descriptor& q, std::span<const Descriptor> set) {
  Nearest n;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const float d = squared_l2(q, set[j]);
    if (d < n.d1) {
      n.d2 = n.d1;
      n.d1 = d;
      n.best = static_cast<int>(j);
    } else if (d < n.d2) {
      n.d2 = d;
    }
  }
  return n;
}

float ratio_of(const Nearest& n, std::size_t set_size) {
  if (set_size < 2) return 0.0f;
  const float d1 = std::sqrt(n.d1);
  const float d2 = std::sqrt(n.d2);
  if (d2 == 0.0f) return 1.0f;
  return d1 / d2;
}

}  // namespace

std::vector<Match> match_descriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                     const MatchMode& mode) {
  std::vector<Match> out;
  if (a.empty() || b.empty()) return out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Nearest n = nearest(a[i], b);
    const float dist = std::sqrt(n.d1);
    const float ratio = ratio_of(n, b.size());
    const bool accepted = mode.kind == MatchMode::Kind::ratio ? ratio <= mode.limit : dist <= mode.limit;
    if (!accepted) continue;
    if (mode.cross_check && nearest(b[static_cast<std::size_t>(n.best)], a).best != static_cast<int>(i)) continue;
    out.push_back({static_cast<int>(i), n.best, dist, ratio});
  }
  return out;
}

std::size_t matched_points(const std::vector<Match>& matches) {
  std::vector<int> partners;
  partners.reserve(matches.size());
  for (const auto& m : matches) partners.push_back(m.index_b);
  std::sort(partners.begin(), partners.end());
  return static_cast<std::size_t>(std::unique(partners.begin(), partners.end()) - partners.begin());
}

double match_score(const Features& a, const Features& b, const MatchMode& mode) {
  const auto n = matched_points(match_descriptors(a.descriptors, b.descriptors, mode));
  const std::size_t denom = std::max<std::size_t>(1, std::min(a.descriptors.size(), b.descriptors.size()));
  return static_cast<double>(n) / static_cast<double>(denom);
}

double match_score(const GrayImage& a, const GrayImage& b, const FeatureParams& params, const MatchMode& mode) {
  return match_score(extract_features(a, params), extract_features(b, params), mode);
}

Features extract_features(const GrayImage& g, const FeatureParams& params) {
  if (params.detector == Detector::sift) return detail::sift_features(g, params.sift, params.max_keypoints, true);

  Features out;
  out.keypoints = harris(g, params.harris);
  std::stable_sort(out.keypoints.begin(), out.keypoints.end(), [](const KeyPoint& p, const KeyPoint& q) {
    if (p.response != q.response) return p.response > q.response;
    if (p.y != q.y) return p.y < q.y;
    return p.x < q.x;
  });
  if (params.max_keypoints > 0 && out.keypoints.size() > params.max_keypoints) {
    out.keypoints.resize(params.max_keypoints);
  }
  const auto level = detail::gaussian_blur(detail::to_float(g), std::sqrt(1.0 - 0.25));
  out.descriptors.resize(out.keypoints.size());
  for (std::size_t i = 0; i < out.keypoints.size(); ++i) {
    const auto& kp = out.keypoints[i];
    detail::describe_on_level(level, kp.x, kp.y, kp.scale, kp.orientation, out.descriptors[i].data());
  }
  return out;
}

}  // namespace palim
