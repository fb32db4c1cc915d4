#include "palim/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "palim/error.hpp"
#include "palim/image_io.hpp"
#include "palim/parallel.hpp"
#include "palim/retrieval.hpp"
#include "palim/wordspot.hpp"

namespace palim {

const std::set<std::string>& GroundTruth::at(const std::string& query) const {
  const auto it = relevant.find(query);
  if (it == relevant.end()) throw_error(ErrorCode::invalid_argument, "missing ground truth for query '" + query + "'");
  return it->second;
}

PrPoint precision_recall(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, int n) {
  if (n < 1) throw_error(ErrorCode::invalid_argument, "cutoff n must be >= 1");
  if (relevant.empty()) throw_error(ErrorCode::invalid_argument, "ground truth has no relevant items");
  const auto top = std::min(ranking.size(), static_cast<std::size_t>(n));
  int r = 0;
  for (std::size_t i = 0; i < top; ++i) r += relevant.count(ranking[i]) ? 1 : 0;
  return {n, r, static_cast<double>(r) / n, static_cast<double>(r) / static_cast<double>(relevant.size())};
}

PrPoint precision_recall(const std::vector<std::string>& ranking, const GroundTruth& gt, const std::string& query,
                         int n) {
  return precision_recall(ranking, gt.at(query), n);
}

std::vector<PrPoint> pr_curve(const std::vector<std::string>& ranking, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw_error(ErrorCode::invalid_argument, "ground truth has no relevant items");
  std::vector<PrPoint> out;
  out.reserve(ranking.size());
  int r = 0;
  const auto m = static_cast<double>(relevant.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    r += relevant.count(ranking[i]) ? 1 : 0;
    const int n = static_cast<int>(i + 1);
    out.push_back({n, r, static_cast<double>(r) / n, r / m});
  }
  return out;
}

std::string format_curve(const std::vector<PrPoint>& curve) {
  std::string out;
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f\n", p.n, p.precision, p.recall);
    out += buf;
  }
  return out;
}

std::string_view to_string(EvalMethod m) {
  switch (m) {
    case EvalMethod::xor_count: return "xor";
    case EvalMethod::edm: return "edm";
    case EvalMethod::profile: return "profile";
    case EvalMethod::sift_pipeline: return "sift-pipeline";
  }
  return "?";
}

std::optional<EvalMethod> parse_eval_method(std::string_view name) {
  if (name == "xor") return EvalMethod::xor_count;
  if (name == "edm") return EvalMethod::edm;
  if (name == "profile") return EvalMethod::profile;
  if (name == "sift-pipeline" || name == "sift") return EvalMethod::sift_pipeline;
  return std::nullopt;
}

std::string format_table(const std::vector<MethodReport>& reports) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %12s %10s\n", "Method", "Precision(%)", "Recall(%)");
  out += buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-14s %12.2f %10.2f\n", r.method.c_str(), r.precision_pct, r.recall_pct);
    out += buf;
  }
  return out;
}

namespace {

struct Candidate {
  std::string id;
  int page = 0;
  Pseudoword pw;
};

std::vector<std::size_t> rank_ascending(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

MethodReport summarize(std::string method, const std::vector<std::string>& queries,
                       const std::vector<std::vector<std::string>>& rankings, const GroundTruth& gt) {
  MethodReport rep;
  rep.method = std::move(method);
  rep.queries = queries;
  double p = 0.0;
  double r = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& rel = gt.at(queries[q]);
    const auto pt = precision_recall(rankings[q], rel, static_cast<int>(rel.size()));
    p += pt.precision;
    r += pt.recall;
    rep.curves.push_back(pr_curve(rankings[q], rel));
  }
  const double nq = std::max<double>(1.0, static_cast<double>(queries.size()));
  rep.precision_pct = 100.0 * p / nq;
  rep.recall_pct = 100.0 * r / nq;
  return rep;
}

}  // namespace

std::vector<MethodReport> evaluate_methods(const Corpus& corpus, const std::vector<EvalMethod>& methods,
                                           const EvalParams& params) {
  const PageSegmentParams seg = params.segment ? *params.segment : corpus_segment_params(params.scale);
  const auto& words = corpus.query_words;
  for (const auto& o : corpus.occurrences) {
    if (std::find(words.begin(), words.end(), o.word) == words.end()) {
      throw_error(ErrorCode::invalid_argument, "ground truth word '" + o.word + "' has no query image");
    }
  }

  const bool pixel = std::any_of(methods.begin(), methods.end(), [](EvalMethod m) { return m != EvalMethod::sift_pipeline; });
  std::vector<Candidate> cands;
  GroundTruth word_gt;
  if (pixel) {
    std::vector<std::vector<Pseudoword>> per_page(corpus.pages.size());
    parallel_for(corpus.pages.size(), params.threads, [&](std::size_t p) {
      per_page[p] = page_pseudowords(binarize(corpus.pages[p], FixedThreshold{128}), seg);
    });
    std::vector<std::vector<std::size_t>> page_cands(corpus.pages.size());
    for (std::size_t p = 0; p < per_page.size(); ++p) {
      for (std::size_t k = 0; k < per_page[p].size(); ++k) {
        page_cands[p].push_back(cands.size());
        cands.push_back({corpus.page_ids[p] + "#" + std::to_string(k), static_cast<int>(p), std::move(per_page[p][k])});
      }
    }
    // Each occurrence claims its best-overlapping unclaimed candidate; unmatched
    // occurrences stay relevant under ids no ranking can contain.
    std::vector<bool> claimed(cands.size(), false);
    for (std::size_t j = 0; j < corpus.occurrences.size(); ++j) {
      const auto& o = corpus.occurrences[j];
      double best = 0.0;
      std::size_t best_c = cands.size();
      for (auto c : page_cands[static_cast<std::size_t>(o.page)]) {
        const double v = iou(cands[c].pw.box, o.box);
        if (!claimed[c] && v > best) {
          best = v;
          best_c = c;
        }
      }
      auto& rel = word_gt.relevant[o.word];
      if (best_c < cands.size() && best >= params.min_iou) {
        claimed[best_c] = true;
        rel.insert(cands[best_c].id);
      } else {
        rel.insert("missing:" + std::to_string(j));
      }
    }
  }

  GroundTruth page_gt;
  for (const auto& o : corpus.occurrences) page_gt.relevant[o.word].insert(corpus.page_ids[static_cast<std::size_t>(o.page)]);

  std::vector<std::string> queries;
  std::vector<std::size_t> query_index;
  for (std::size_t q = 0; q < words.size(); ++q) {
    if (page_gt.relevant.count(words[q])) {
      queries.push_back(words[q]);
      query_index.push_back(q);
    }
  }

  std::vector<Features> page_features;
  std::vector<MethodReport> out;
  for (EvalMethod m : methods) {
    std::vector<std::vector<std::string>> rankings(queries.size());
    if (m == EvalMethod::sift_pipeline) {
      if (page_features.empty()) {
        page_features.resize(corpus.pages.size());
        parallel_for(corpus.pages.size(), params.threads,
                     [&](std::size_t p) { page_features[p] = extract_features(corpus.pages[p], params.features); });
      }
      parallel_for(queries.size(), params.threads, [&](std::size_t q) {
        const auto& ink = corpus.queries[query_index[q]];
        const int pad = 16;
        const auto padded = render(place(ink, ink.width() + 2 * pad, ink.height() + 2 * pad, pad, pad));
        const auto qf = extract_features(padded, params.features);
        std::vector<double> neg(corpus.pages.size());
        for (std::size_t p = 0; p < corpus.pages.size(); ++p) {
          const auto matches = match_descriptors(qf.descriptors, page_features[p].descriptors);
          neg[p] = -static_cast<double>(matches.size()) / static_cast<double>(std::max<std::size_t>(1, qf.descriptors.size()));
        }
        for (auto p : rank_ascending(neg)) rankings[q].push_back(corpus.page_ids[p]);
      });
      out.push_back(summarize(std::string(to_string(m)), queries, rankings, page_gt));
      continue;
    }
    const SpotMethod sm = m == EvalMethod::xor_count ? SpotMethod::xor_count
                          : m == EvalMethod::edm     ? SpotMethod::edm
                                                     : SpotMethod::profile;
    parallel_for(queries.size(), params.threads, [&](std::size_t q) {
      const auto& query = corpus.queries[query_index[q]];
      std::vector<double> scores(cands.size());
      for (std::size_t c = 0; c < cands.size(); ++c) scores[c] = spot_score(cands[c].pw.pixels, query, sm);
      for (auto c : rank_ascending(scores)) rankings[q].push_back(cands[c].id);
    });
    out.push_back(summarize(std::string(to_string(m)), queries, rankings, word_gt));
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& dir, const std::filesystem::path& groundtruth) {
  Corpus c;
  const auto manifest = read_manifest(dir / "manifest.tsv");
  for (const auto& e : manifest) {
    c.page_ids.push_back(e.id);
    c.pages.push_back(load_image(e.path));
  }
  const auto gt_path = groundtruth.empty() ? dir / "groundtruth.tsv" : groundtruth;
  std::ifstream in(gt_path, std::ios::binary);
  if (!in) throw_error(ErrorCode::io, "cannot open ground truth " + gt_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, '\t');) f.push_back(tok);
    auto fail = [&] {
      throw_error(ErrorCode::format, gt_path.string() + ":" + std::to_string(line_no) + ": expected word page x y w h");
    };
    if (f.size() != 6) fail();
    Occurrence o;
    o.word = f[0];
    const auto it = std::find(c.page_ids.begin(), c.page_ids.end(), f[1]);
    if (it == c.page_ids.end()) {
      throw_error(ErrorCode::format, gt_path.string() + ":" + std::to_string(line_no) + ": unknown page '" + f[1] + "'");
    }
    o.page = static_cast<int>(it - c.page_ids.begin());
    int* fields[4] = {&o.box.x, &o.box.y, &o.box.w, &o.box.h};
    for (int i = 0; i < 4; ++i) {
      const auto& s = f[static_cast<std::size_t>(i + 2)];
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *fields[i]);
      if (ec != std::errc{} || ptr != s.data() + s.size()) fail();
    }
    if (std::find(c.query_words.begin(), c.query_words.end(), o.word) == c.query_words.end()) {
      c.query_words.push_back(o.word);
    }
    c.occurrences.push_back(std::move(o));
  }
  for (const auto& w : c.query_words) {
    const auto ink = binarize(load_image(dir / "queries" / (w + ".pgm")), FixedThreshold{128});
    if (ink.count() == 0) throw_error(ErrorCode::domain, "query image for '" + w + "' has no foreground");
    c.queries.push_back(crop(ink, tight_box(ink)));
  }
  return c;
}

}  // namespace palim
