#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "palim/image.hpp"
#include "palim/segmentation.hpp"

namespace palim {

enum class SpotMethod { xor_count, edm, profile };

std::string_view to_string(SpotMethod m);
std::optional<SpotMethod> parse_spot_method(std::string_view name);

/// Dissimilarity of a candidate crop to the query; 0 for identical ink.
///   xor_count: error pixels after both are tight-cropped and centered on a common canvas
///   edm:       edm_error(candidate, query).scalar on the same canvas
///   profile:   profile_distance of the tight crops
double spot_score(const BinaryImage& candidate, const BinaryImage& query, SpotMethod method);

struct SpotHit {
  Box box;
  double score = 0.0;
  std::size_t order = 0;  // reading-order position among the candidates
};

/// Scores every candidate, ascending; ties keep reading order. top_n 0 keeps all.
std::vector<SpotHit> wordspot(const std::vector<Pseudoword>& candidates, const BinaryImage& query, SpotMethod method,
                              std::size_t top_n = 0);

/// Segments `page` into pseudowords first.
std::vector<SpotHit> wordspot(const BinaryImage& page, const BinaryImage& query, SpotMethod method,
                              std::size_t top_n = 0, const PageSegmentParams& params = {});

}  // namespace palim
