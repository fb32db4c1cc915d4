#include "palim/wordspot.hpp"

#include <algorithm>

#include "palim/error.hpp"
#include "palim/pixelmatch.hpp"

namespace palim {

std::string_view to_string(SpotMethod m) {
  switch (m) {
    case SpotMethod::xor_count: return "xor";
    case SpotMethod::edm: return "edm";
    case SpotMethod::profile: return "profile";
  }
  return "?";
}

std::optional<SpotMethod> parse_spot_method(std::string_view name) {
  if (name == "xor") return SpotMethod::xor_count;
  if (name == "edm") return SpotMethod::edm;
  if (name == "profile") return SpotMethod::profile;
  return std::nullopt;
}

double spot_score(const BinaryImage& candidate, const BinaryImage& query, SpotMethod method) {
  if (query.count() == 0) throw_error(ErrorCode::domain, "no foreground in query");
  switch (method) {
    case SpotMethod::xor_count: {
      const auto [c, q] = align_pair(candidate, query);
      return static_cast<double>(xor_diff(c, q).count());
    }
    case SpotMethod::edm: {
      const auto [c, q] = align_pair(candidate, query);
      return edm_error(c, q).scalar;
    }
    case SpotMethod::profile: {
      const auto tc = candidate.count() ? crop(candidate, tight_box(candidate)) : candidate;
      const auto tq = crop(query, tight_box(query));
      return profile_distance(vertical_profile(tc), vertical_profile(tq));
    }
  }
  return 0.0;
}

std::vector<SpotHit> wordspot(const std::vector<Pseudoword>& candidates, const BinaryImage& query, SpotMethod method,
                              std::size_t top_n) {
  if (query.count() == 0) throw_error(ErrorCode::domain, "no foreground in query");
  if (candidates.empty()) throw_error(ErrorCode::domain, "no pseudowords found");
  std::vector<SpotHit> hits;
  hits.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    hits.push_back({candidates[i].box, spot_score(candidates[i].pixels, query, method), i});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const SpotHit& a, const SpotHit& b) { return a.score < b.score; });
  if (top_n > 0 && hits.size() > top_n) hits.resize(top_n);
  return hits;
}

std::vector<SpotHit> wordspot(const BinaryImage& page, const BinaryImage& query, SpotMethod method, std::size_t top_n,
                              const PageSegmentParams& params) {
  if (query.count() == 0) throw_error(ErrorCode::domain, "no foreground in query");
  return wordspot(page_pseudowords(page, params), query, method, top_n);
}

}  // namespace palim
