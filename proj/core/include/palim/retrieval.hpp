#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "palim/fractal.hpp"
#include "palim/image.hpp"
#include "palim/keypoints.hpp"
#include "palim/segmentation.hpp"

namespace palim {

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;
  std::string label;
};

using Manifest = std::vector<ManifestEntry>;

/// `id<TAB>path[<TAB>label]` lines; blank lines and `#` comments are skipped.
/// Relative paths are resolved against `base`. Duplicate ids or paths are a
/// format error.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base = {});
Manifest read_manifest(const std::filesystem::path& path);

struct IndexConfig {
  NormalizationParams normalization;
  FdConfig fd;
  /// Methods taking part in FD rejection by default.
  std::array<bool, 4> fd_enabled{true, true, true, true};
  FeatureParams features;
  /// Store pseudoword boxes computed with these settings.
  std::optional<PageSegmentParams> pseudowords;
};

struct IndexRecord {
  std::string id;
  std::string label;
  int width = 0;  // normalized
  int height = 0;
  std::uint64_t digest = 0;
  FdSignature signature;
  std::vector<Box> pseudowords;
  Features features;

  friend bool operator==(const IndexRecord&, const IndexRecord&) = default;
};

struct Index {
  static constexpr int kVersion = 1;
  IndexConfig config;
  std::vector<IndexRecord> records;

  const IndexRecord* find(std::string_view id) const;
};

/// FNV-1a 64 over the dimensions and pixels.
std::uint64_t image_digest(const GrayImage& g);

/// Normalizes, signs and keypoints one page.
IndexRecord make_record(std::string id, std::string label, const GrayImage& page, const IndexConfig& config);

struct BuildOptions {
  bool skip_unreadable = false;  // otherwise an unreadable entry aborts
  int threads = 1;
};

/// Records follow manifest order whatever the thread count. Skipped entries
/// are reported through `warnings`.
Index build_index(const Manifest& manifest, const IndexConfig& config, const BuildOptions& options = {},
                  std::vector<std::string>* warnings = nullptr);

/// True when `page` normalizes to the bytes the record was built from.
bool verify_digest(const IndexRecord& record, const GrayImage& page, const NormalizationParams& params);

std::vector<std::uint8_t> serialize_index(const Index& index);
Index parse_index(std::span<const std::uint8_t> bytes);
void save_index(const std::filesystem::path& path, const Index& index);
Index load_index(const std::filesystem::path& path);

inline constexpr double kNoTolerance = std::numeric_limits<double>::infinity();

struct FdTolerance {
  std::array<double, 4> tau{kNoTolerance, kNoTolerance, kNoTolerance, kNoTolerance};
  std::array<bool, 4> enabled{true, true, true, true};
};

/// Euclidean distance over the enabled methods.
double fd_distance(const FdSignature& a, const FdSignature& b, const FdTolerance& tol);

/// Indices of records whose every enabled |FD difference| is within its tau.
std::vector<std::size_t> reject_by_fd(const Index& index, const FdSignature& query, const FdTolerance& tol);

struct QueryParams {
  FdTolerance tolerance;
  MatchMode match;
  std::size_t top_n = 0;  // 0: every survivor with a positive score
  /// The query is a block cut from a page: it is not normalized, FD rejection
  /// is skipped and the score is matches / |query keypoints|.
  bool block_mode = false;
  int threads = 1;
};

struct RankedResult {
  std::string id;
  double score = 0.0;
  double fd_distance = 0.0;
  std::size_t matches = 0;
};

struct RankedResults {
  std::string query_id;
  std::vector<RankedResult> results;  // score descending, FD distance ascending, id ascending
  std::size_t candidates_in = 0;
  std::size_t candidates_out = 0;  // survivors of the FD stage
  std::vector<std::size_t> survivors;
};

RankedResults query(const Index& index, const GrayImage& query_image, const QueryParams& params = {},
                    std::string query_id = {});

}  // namespace palim
