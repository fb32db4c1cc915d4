#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "palim/corpus.hpp"
#include "palim/keypoints.hpp"
#include "palim/segmentation.hpp"

namespace palim {

/// Relevant item ids per query id.
struct GroundTruth {
  std::map<std::string, std::set<std::string>> relevant;

  const std::set<std::string>& at(const std::string& query) const;  // throws when missing
};

struct PrPoint {
  int n = 0;
  int r = 0;
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

/// P = r / n and R = r / m over the first n ranked ids (fewer when the ranking
/// is shorter; n still divides).
PrPoint precision_recall(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int n);
PrPoint precision_recall(const std::vector<std::string>& ranking, const GroundTruth& gt, const std::string& query,
                         int n);

/// One point per cutoff n = 1 .. ranking.size().
std::vector<PrPoint> pr_curve(const std::vector<std::string>& ranking, const std::set<std::string>& relevant);

/// `n P R` rows.
std::string format_curve(const std::vector<PrPoint>& curve);

enum class EvalMethod { xor_count, edm, profile, sift_pipeline };

std::string_view to_string(EvalMethod m);
std::optional<EvalMethod> parse_eval_method(std::string_view name);

struct MethodReport {
  std::string method;
  double precision_pct = 0.0;  // mean over queries at n = m
  double recall_pct = 0.0;
  std::vector<std::string> queries;
  std::vector<std::vector<PrPoint>> curves;
};

/// `Method Precision(%) Recall(%)` table, aligned columns.
std::string format_table(const std::vector<MethodReport>& reports);

struct EvalParams {
  std::optional<PageSegmentParams> segment;  // default: corpus_segment_params(scale)
  int scale = 4;
  double min_iou = 0.5;
  FeatureParams features;
  int threads = 1;
};

/// Word spotting under each method, every query word against every pseudoword
/// of every page. For the pixel methods an item is a pseudoword and an
/// occurrence counts as found when a candidate box overlaps it with IoU >=
/// min_iou; m is the number of true occurrences. sift-pipeline ranks whole
/// pages by keypoint matches against the query word, and its relevant items
/// are the pages containing the word.
std::vector<MethodReport> evaluate_methods(const Corpus& corpus, const std::vector<EvalMethod>& methods,
                                           const EvalParams& params = {});

/// Reads a corpus directory written by write_corpus: pages via manifest.tsv,
/// queries from queries/, occurrences from `groundtruth` (default
/// <dir>/groundtruth.tsv).
Corpus load_corpus(const std::filesystem::path& dir, const std::filesystem::path& groundtruth = {});

}  // namespace palim
