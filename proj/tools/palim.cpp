// palim: command-line front end for the palim document image library.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "palim/corpus.hpp"
#include "palim/error.hpp"
#include "palim/evaluation.hpp"
#include "palim/fractal.hpp"
#include "palim/image.hpp"
#include "palim/image_io.hpp"
#include "palim/keypoints.hpp"
#include "palim/parallel.hpp"
#include "palim/pixelmatch.hpp"
#include "palim/retrieval.hpp"
#include "palim/segmentation.hpp"
#include "palim/wordspot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

int exit_code(const palim::Error& e) { return e.code() == palim::ErrorCode::domain ? kExitDomain : kExitUsage; }

struct Global {
  bool json = false;
  int threads = 0;
  int verbose = 0;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void emit(const Global& g, const json& obj, const std::string& text) {
  if (g.json) {
    std::cout << obj.dump() << '\n';
  } else {
    std::cout << text << '\n';
  }
}

palim::ThresholdMethod parse_threshold(const std::string& s) {
  if (s == "otsu") return palim::OtsuThreshold{};
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= 0 && v <= 256) return palim::FixedThreshold{v};
  } catch (const std::exception&) {
  }
  palim::throw_error(palim::ErrorCode::invalid_argument, "threshold must be 'otsu' or 0..256, got '" + s + "'");
}

palim::BinaryImage load_binary(const fs::path& p, const std::string& threshold) {
  return palim::binarize(palim::load_image(p), parse_threshold(threshold));
}

void save_binary(const fs::path& p, const palim::BinaryImage& b) { palim::save_pgm(p, palim::render(b)); }

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) palim::throw_error(palim::ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, sep);) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// ---------------------------------------------------------------- fd

struct FdOpts {
  std::vector<std::string> images;
  std::string method = "all";
  std::vector<int> sizes;
  std::string threshold = "otsu";
  bool strict = false;
};

int run_fd(const Global& g, const FdOpts& o) {
  std::vector<palim::FdMethod> methods;
  if (o.method == "all") {
    methods.assign(palim::kAllFdMethods.begin(), palim::kAllFdMethods.end());
  } else if (auto m = palim::parse_fd_method(o.method)) {
    methods.push_back(*m);
  } else {
    palim::throw_error(palim::ErrorCode::invalid_argument, "unknown FD method '" + o.method + "'");
  }
  const auto threshold = parse_threshold(o.threshold);

  struct Row {
    std::vector<palim::FdEstimate> estimates;
    std::optional<palim::Error> error;
  };
  std::vector<Row> rows(o.images.size());
  palim::parallel_for(o.images.size(), palim::resolve_threads(g.threads), [&](std::size_t i) {
    try {
      const auto gray = palim::load_image(o.images[i]);
      const auto bin = palim::binarize(gray, threshold);
      for (auto m : methods) {
        std::span<const int> sizes = o.sizes;
        std::vector<int> defaults;
        if (sizes.empty()) {
          switch (m) {
            case palim::FdMethod::dbc: defaults = palim::default_dbc_sizes(gray.width(), gray.height()); break;
            case palim::FdMethod::dilation: defaults = palim::default_dilation_radii(gray.width(), gray.height()); break;
            default: defaults = palim::default_box_sizes(gray.width(), gray.height()); break;
          }
          sizes = defaults;
        }
        switch (m) {
          case palim::FdMethod::box: rows[i].estimates.push_back(palim::fd_box_counting(bin, sizes)); break;
          case palim::FdMethod::dbc: rows[i].estimates.push_back(palim::fd_differential_box_counting(gray, sizes)); break;
          case palim::FdMethod::cdb: rows[i].estimates.push_back(palim::fd_cdb(bin, sizes)); break;
          case palim::FdMethod::dilation: rows[i].estimates.push_back(palim::fd_dilation(bin, sizes)); break;
        }
      }
    } catch (const palim::Error& e) {
      rows[i].error = e;
    }
  });

  int failures = 0;
  int last_code = kExitOk;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].error) {
      std::cerr << "palim fd: " << o.images[i] << ": " << rows[i].error->what() << '\n';
      ++failures;
      last_code = exit_code(*rows[i].error);
      if (o.strict) return last_code;
      continue;
    }
    for (const auto& est : rows[i].estimates) {
      const std::string name(palim::to_string(est.method));
      json obj{{"image", o.images[i]}, {"method", name}, {"D", est.dimension}, {"r2", est.fit_r2}};
      emit(g, obj, o.images[i] + " " + name + " D=" + fmt(est.dimension) + " r2=" + fmt(est.fit_r2));
    }
  }
  return failures == static_cast<int>(rows.size()) && failures > 0 ? last_code : kExitOk;
}

// ---------------------------------------------------------------- index

struct IndexOpts {
  std::string manifest;
  std::string out;
  std::string detector = "sift";
  std::vector<std::string> no_fd;
  std::size_t max_keypoints = 500;
  bool skip_unreadable = false;
  bool pseudowords = false;
  int scale = 4;
};

int run_index(const Global& g, const IndexOpts& o) {
  palim::IndexConfig cfg;
  const auto det = palim::parse_detector(o.detector);
  if (!det) palim::throw_error(palim::ErrorCode::invalid_argument, "unknown detector '" + o.detector + "'");
  cfg.features.detector = *det;
  cfg.features.max_keypoints = o.max_keypoints;
  for (const auto& name : o.no_fd) {
    const auto m = palim::parse_fd_method(name);
    if (!m) palim::throw_error(palim::ErrorCode::invalid_argument, "unknown FD method '" + name + "'");
    cfg.fd_enabled[static_cast<std::size_t>(*m)] = false;
  }
  if (o.pseudowords) cfg.pseudowords = palim::corpus_segment_params(o.scale);

  const auto manifest = palim::read_manifest(o.manifest);
  std::vector<std::string> warnings;
  const auto t0 = std::chrono::steady_clock::now();
  const auto index = palim::build_index(manifest, cfg, {o.skip_unreadable, palim::resolve_threads(g.threads)}, &warnings);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& w : warnings) std::cerr << "palim index: warning: " << w << '\n';
  palim::save_index(o.out, index);
  if (g.verbose) std::cerr << "palim index: " << index.records.size() << " records in " << fmt(secs) << " s\n";
  json obj{{"index", o.out}, {"records", index.records.size()}, {"skipped", warnings.size()}};
  emit(g, obj, "indexed " + std::to_string(index.records.size()) + " records into " + o.out +
                   (warnings.empty() ? "" : " (" + std::to_string(warnings.size()) + " skipped)"));
  return kExitOk;
}

// ---------------------------------------------------------------- query

struct QueryOpts {
  std::string index;
  std::string image;
  std::string tau = "inf";
  std::size_t top = 0;
  double ratio = 0.8;
  bool block = false;
};

palim::FdTolerance parse_tau(const std::string& s, const std::array<bool, 4>& enabled) {
  palim::FdTolerance tol;
  tol.enabled = enabled;
  const auto parts = split(s, ',');
  if (parts.size() != 1 && parts.size() != 4) {
    palim::throw_error(palim::ErrorCode::invalid_argument, "--tau takes one value or four (box,dbc,cdb,dilation)");
  }
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& p = parts[parts.size() == 1 ? 0 : m];
    double v = 0.0;
    if (p == "inf") {
      v = palim::kNoTolerance;
    } else {
      try {
        std::size_t used = 0;
        v = std::stod(p, &used);
        if (used != p.size()) throw std::invalid_argument(p);
      } catch (const std::exception&) {
        palim::throw_error(palim::ErrorCode::invalid_argument, "bad tau value '" + p + "'");
      }
    }
    if (!(v >= 0.0)) palim::throw_error(palim::ErrorCode::invalid_argument, "tau must be >= 0");
    tol.tau[m] = v;
  }
  return tol;
}

int run_query(const Global& g, const QueryOpts& o) {
  const auto index = palim::load_index(o.index);
  palim::QueryParams qp;
  qp.tolerance = parse_tau(o.tau, index.config.fd_enabled);
  qp.match = palim::MatchMode::ratio(o.ratio);
  qp.top_n = o.top;
  qp.block_mode = o.block;
  qp.threads = palim::resolve_threads(g.threads);
  const auto res = palim::query(index, palim::load_image(o.image), qp, o.image);
  if (g.json) {
    std::cout << json{{"query", res.query_id}, {"candidates", res.candidates_in}, {"survivors", res.candidates_out}}.dump()
              << '\n';
  } else {
    std::cout << "# query " << res.query_id << " candidates=" << res.candidates_in << " survivors=" << res.candidates_out
              << '\n';
  }
  for (std::size_t i = 0; i < res.results.size(); ++i) {
    const auto& r = res.results[i];
    json obj{{"rank", i + 1}, {"id", r.id}, {"score", r.score}, {"fd_distance", r.fd_distance}, {"matches", r.matches}};
    emit(g, obj,
         std::to_string(i + 1) + "\t" + r.id + "\t" + fmt(r.score) + "\t" + fmt(r.fd_distance) + "\t" +
             std::to_string(r.matches));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- spot

struct SpotOpts {
  std::string document;
  std::string query;
  std::string method = "edm";
  std::size_t top = 0;
  int scale = 4;
  std::string threshold = "128";
};

int run_spot(const Global& g, const SpotOpts& o) {
  const auto m = palim::parse_spot_method(o.method);
  if (!m) palim::throw_error(palim::ErrorCode::invalid_argument, "unknown method '" + o.method + "'");
  const auto page = load_binary(o.document, o.threshold);
  auto query = load_binary(o.query, o.threshold);
  if (query.count() == 0) palim::throw_error(palim::ErrorCode::domain, "no foreground in query");
  query = palim::crop(query, palim::tight_box(query));
  const auto hits = palim::wordspot(page, query, *m, o.top, palim::corpus_segment_params(o.scale));
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto& h = hits[i];
    json obj{{"rank", i + 1}, {"x", h.box.x}, {"y", h.box.y}, {"w", h.box.w}, {"h", h.box.h}, {"score", h.score}};
    emit(g, obj,
         std::to_string(i + 1) + "\t" + std::to_string(h.box.x) + "\t" + std::to_string(h.box.y) + "\t" +
             std::to_string(h.box.w) + "\t" + std::to_string(h.box.h) + "\t" + fmt(h.score));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOpts {
  std::string corpus;
  std::string gt;
  std::string methods = "xor,edm,profile";
  std::string curves;
  int scale = 4;
};

int run_eval(const Global& g, const EvalOpts& o) {
  std::vector<palim::EvalMethod> methods;
  for (const auto& name : split(o.methods, ',')) {
    const auto m = palim::parse_eval_method(name);
    if (!m) palim::throw_error(palim::ErrorCode::invalid_argument, "unknown method '" + name + "'");
    methods.push_back(*m);
  }
  if (methods.empty()) palim::throw_error(palim::ErrorCode::invalid_argument, "no methods given");
  const fs::path gt = o.gt.empty() ? fs::path(o.corpus) / "groundtruth.tsv" : fs::path(o.gt);
  if (!fs::exists(gt)) palim::throw_error(palim::ErrorCode::io, "ground truth not found: " + gt.string());
  const auto corpus = palim::load_corpus(o.corpus, gt);
  palim::EvalParams ep;
  ep.scale = o.scale;
  ep.threads = palim::resolve_threads(g.threads);
  const auto reports = palim::evaluate_methods(corpus, methods, ep);
  if (g.json) {
    for (const auto& r : reports) {
      std::cout << json{{"method", r.method}, {"precision", r.precision_pct}, {"recall", r.recall_pct}}.dump() << '\n';
    }
  } else {
    std::cout << palim::format_table(reports);
  }
  if (!o.curves.empty()) {
    for (const auto& r : reports) {
      const fs::path dir = fs::path(o.curves) / r.method;
      make_dir(dir);
      for (std::size_t q = 0; q < r.queries.size(); ++q) {
        std::ofstream out(dir / (r.queries[q] + ".txt"), std::ios::binary);
        out << "# n P R\n" << palim::format_curve(r.curves[q]);
        if (!out) palim::throw_error(palim::ErrorCode::io, "cannot write curves into " + dir.string());
      }
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- gen-corpus

struct GenOpts {
  palim::CorpusParams params;
  std::string out;
};

int run_gen(const Global& g, const GenOpts& o) {
  const auto corpus = palim::generate_corpus(o.params);
  palim::write_corpus(corpus, o.out);
  json obj{{"dir", o.out}, {"pages", corpus.pages.size()}, {"queries", corpus.query_words.size()},
           {"occurrences", corpus.occurrences.size()}};
  emit(g, obj,
       "wrote " + std::to_string(corpus.pages.size()) + " pages, " + std::to_string(corpus.query_words.size()) +
           " queries, " + std::to_string(corpus.occurrences.size()) + " occurrences to " + o.out);
  return kExitOk;
}

// ---------------------------------------------------------------- segment / kmeans

struct SegmentOpts {
  std::string image;
  std::string out;
  int scale = 4;
  std::string threshold = "otsu";
};

int run_segment(const Global& g, const SegmentOpts& o) {
  const auto page = load_binary(o.image, o.threshold);
  const auto params = palim::corpus_segment_params(o.scale);
  make_dir(o.out);
  std::ofstream boxes(fs::path(o.out) / "boxes.tsv", std::ios::binary);
  boxes << "# kind\tindex\tx\ty\tw\th\tfile\n";
  const auto geometry = palim::remove_small_components(page, params.smear.min_component_area);
  auto smear = params.smear;
  smear.min_component_area = 0;
  const auto blocks = palim::extract_text_blocks(geometry, smear);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i].box;
    const std::string kind = blocks[i].kind == palim::BlockKind::text ? "text" : "other";
    boxes << "block\t" << i << '\t' << b.x << '\t' << b.y << '\t' << b.w << '\t' << b.h << "\t-\n";
    json obj{{"kind", "block"}, {"index", i}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"type", kind}};
    emit(g, obj, "block\t" + std::to_string(i) + "\t" + std::to_string(b.x) + "\t" + std::to_string(b.y) + "\t" +
                     std::to_string(b.w) + "\t" + std::to_string(b.h) + "\t" + kind);
  }
  const auto words = palim::page_pseudowords(page, params);
  for (std::size_t i = 0; i < words.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "word_%04zu.pgm", i);
    save_binary(fs::path(o.out) / name, words[i].pixels);
    const auto& b = words[i].box;
    boxes << "word\t" << i << '\t' << b.x << '\t' << b.y << '\t' << b.w << '\t' << b.h << '\t' << name << '\n';
    json obj{{"kind", "word"}, {"index", i}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"file", name}};
    emit(g, obj, "word\t" + std::to_string(i) + "\t" + std::to_string(b.x) + "\t" + std::to_string(b.y) + "\t" +
                     std::to_string(b.w) + "\t" + std::to_string(b.h) + "\t" + name);
  }
  if (!boxes) palim::throw_error(palim::ErrorCode::io, "cannot write boxes.tsv");
  return kExitOk;
}

struct KmeansOpts {
  std::string image;
  std::string out;
  int k = 3;
  int max_iter = 100;
  std::uint64_t seed = 0;
};

int run_kmeans(const Global& g, const KmeansOpts& o) {
  const auto cm = palim::kmeans_classes(palim::load_image(o.image), o.k, o.max_iter, o.seed);
  make_dir(o.out);
  for (int c = 0; c < cm.k; ++c) {
    const auto layer = palim::class_layer(cm, c);
    char name[32];
    std::snprintf(name, sizeof name, "class_%02d.pgm", c);
    save_binary(fs::path(o.out) / name, layer);
    json obj{{"class", c}, {"center", cm.centers[static_cast<std::size_t>(c)]}, {"pixels", layer.count()}, {"file", name}};
    emit(g, obj, "class\t" + std::to_string(c) + "\t" + fmt(cm.centers[static_cast<std::size_t>(c)]) + "\t" +
                     std::to_string(layer.count()) + "\t" + name);
  }
  if (g.verbose) std::cerr << "palim kmeans: " << cm.iterations << " iterations, sse " << fmt(cm.sse) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- xor

struct XorOpts {
  std::string query;
  std::string reference;
  std::string out;
  bool align = false;
  std::string threshold = "otsu";
};

int run_xor(const Global& g, const XorOpts& o) {
  auto q = load_binary(o.query, o.threshold);
  auto r = load_binary(o.reference, o.threshold);
  if (o.align) std::tie(q, r) = palim::align_pair(q, r);
  const auto diff = palim::xor_diff(q, r);
  if (!o.out.empty()) save_binary(o.out, diff);
  const auto rep = palim::edm_error(q, r);
  if (g.json) {
    std::cout << json{{"xor_count", diff.count()},
                      {"error_pixel_count", rep.error_pixel_count},
                      {"sum_distance", rep.sum_distance},
                      {"mean_distance", rep.mean_distance},
                      {"max_distance", rep.max_distance},
                      {"scalar", rep.scalar},
                      {"histogram", rep.histogram}}
                     .dump()
              << '\n';
  } else {
    std::cout << "xor_count=" << diff.count() << '\n' << palim::to_key_values(rep);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- keypoints

struct KeypointOpts {
  std::string image;
  std::string detector = "sift";
  std::size_t max_keypoints = 500;
};

int run_keypoints(const Global& g, const KeypointOpts& o) {
  palim::FeatureParams fp;
  const auto det = palim::parse_detector(o.detector);
  if (!det) palim::throw_error(palim::ErrorCode::invalid_argument, "unknown detector '" + o.detector + "'");
  fp.detector = *det;
  fp.max_keypoints = o.max_keypoints;
  const auto f = palim::extract_features(palim::load_image(o.image), fp);
  for (const auto& k : f.keypoints) {
    json obj{{"x", k.x}, {"y", k.y}, {"scale", k.scale}, {"orientation", k.orientation}, {"response", k.response}};
    emit(g, obj, fmt(k.x) + " " + fmt(k.y) + " " + fmt(k.scale) + " " + fmt(k.orientation) + " " + fmt(k.response));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"palim: fractal signatures, word spotting and keypoint retrieval for document images"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_flag("--json", g.json, "One JSON object per output record");
  app.add_option("--threads", g.threads, "Worker threads (0: logical cores; PALIM_THREADS overrides)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", g.verbose, "Progress on stderr");

  int rc = kExitOk;
  std::function<int()> run;

  FdOpts fd;
  auto* c_fd = app.add_subcommand("fd", "Fractal dimensions of page images");
  c_fd->add_option("images", fd.images, "Image files")->required();
  c_fd->add_option("--method", fd.method, "box|dbc|cdb|dilation|all")->capture_default_str();
  c_fd->add_option("--sizes", fd.sizes, "Box sizes / dilation radii")->delimiter(',');
  c_fd->add_option("--threshold", fd.threshold, "otsu or a fixed gray level")->capture_default_str();
  c_fd->add_flag("--strict", fd.strict, "Stop at the first failing image");
  c_fd->callback([&] { run = [&] { return run_fd(g, fd); }; });

  IndexOpts ix;
  auto* c_ix = app.add_subcommand("index", "Build a retrieval index from a manifest");
  c_ix->add_option("manifest", ix.manifest, "id<TAB>path<TAB>label lines")->required();
  c_ix->add_option("--out,-o", ix.out, "Index file")->required();
  c_ix->add_option("--detector", ix.detector, "sift|harris")->capture_default_str();
  c_ix->add_option("--no-fd-method", ix.no_fd, "Exclude an FD method from rejection (repeatable)");
  c_ix->add_option("--max-keypoints", ix.max_keypoints, "Strongest keypoints kept per page (0: all)")
      ->capture_default_str();
  c_ix->add_flag("--skip-unreadable", ix.skip_unreadable, "Warn and skip unreadable images instead of aborting");
  c_ix->add_flag("--pseudowords", ix.pseudowords, "Store pseudoword boxes");
  c_ix->add_option("--scale", ix.scale, "Font scale for pseudoword segmentation")->capture_default_str();
  c_ix->callback([&] { run = [&] { return run_index(g, ix); }; });

  QueryOpts qo;
  auto* c_q = app.add_subcommand("query", "Rank indexed documents against a query image");
  c_q->add_option("index", qo.index, "Index file")->required();
  c_q->add_option("image", qo.image, "Query image")->required();
  c_q->add_option("--tau", qo.tau, "FD tolerance: one value or box,dbc,cdb,dilation; 'inf' disables")
      ->capture_default_str();
  c_q->add_option("--top", qo.top, "Keep the n best (0: every survivor with a positive score)");
  c_q->add_option("--ratio", qo.ratio, "Nearest/second-nearest ratio limit")->capture_default_str();
  c_q->add_flag("--block", qo.block, "Query is a block cut from a page");
  c_q->callback([&] { run = [&] { return run_query(g, qo); }; });

  SpotOpts so;
  auto* c_s = app.add_subcommand("spot", "Word spotting in one page");
  c_s->add_option("document", so.document, "Page image")->required();
  c_s->add_option("query", so.query, "Query word image")->required();
  c_s->add_option("--method", so.method, "xor|edm|profile")->capture_default_str();
  c_s->add_option("--top", so.top, "Keep the n best (0: all)");
  c_s->add_option("--scale", so.scale, "Font scale the segmentation is tuned for")->capture_default_str();
  c_s->add_option("--threshold", so.threshold, "otsu or a fixed gray level")->capture_default_str();
  c_s->callback([&] { run = [&] { return run_spot(g, so); }; });

  EvalOpts eo;
  auto* c_e = app.add_subcommand("eval", "Precision/recall of word spotting methods over a corpus");
  c_e->add_option("corpus", eo.corpus, "Corpus directory (manifest.tsv, pages/, queries/)")->required();
  c_e->add_option("gt", eo.gt, "Ground truth file (default <corpus>/groundtruth.tsv)");
  c_e->add_option("--methods", eo.methods, "Comma list of xor,edm,profile,sift-pipeline")->capture_default_str();
  c_e->add_option("--curves", eo.curves, "Directory for per-query `n P R` curve files");
  c_e->add_option("--scale", eo.scale, "Font scale of the corpus")->capture_default_str();
  c_e->callback([&] { run = [&] { return run_eval(g, eo); }; });

  GenOpts go;
  auto* c_g = app.add_subcommand("gen-corpus", "Render a synthetic word-spotting corpus");
  c_g->add_option("--words", go.params.words, "Distinct query words")->capture_default_str();
  c_g->add_option("--repeats", go.params.repeats, "Occurrences per query word")->capture_default_str();
  c_g->add_option("--noise", go.params.noise, "Pixel flip probability")->capture_default_str();
  c_g->add_option("--seed", go.params.seed, "Random seed")->capture_default_str();
  c_g->add_option("--pages", go.params.pages, "Page count (0: three occurrences per page)")->capture_default_str();
  c_g->add_option("--scale", go.params.scale, "Pixels per font pixel")->capture_default_str();
  c_g->add_option("--words-per-page", go.params.words_per_page, "Words per page")->capture_default_str();
  c_g->add_option("--out,-o", go.out, "Output directory")->required();
  c_g->callback([&] { run = [&] { return run_gen(g, go); }; });

  SegmentOpts sg;
  auto* c_sg = app.add_subcommand("segment", "Text blocks and pseudoword crops of a page");
  c_sg->add_option("image", sg.image, "Page image")->required();
  c_sg->add_option("--out,-o", sg.out, "Output directory")->required();
  c_sg->add_option("--scale", sg.scale, "Font scale the segmentation is tuned for")->capture_default_str();
  c_sg->add_option("--threshold", sg.threshold, "otsu or a fixed gray level")->capture_default_str();
  c_sg->callback([&] { run = [&] { return run_segment(g, sg); }; });

  KmeansOpts km;
  auto* c_k = app.add_subcommand("kmeans", "Intensity classes of a page as binary layers");
  c_k->add_option("image", km.image, "Page image")->required();
  c_k->add_option("--out,-o", km.out, "Output directory")->required();
  c_k->add_option("--k", km.k, "Number of classes")->capture_default_str();
  c_k->add_option("--max-iter", km.max_iter, "Iteration cap")->capture_default_str();
  c_k->add_option("--seed", km.seed, "Seed for re-seeding empty clusters")->capture_default_str();
  c_k->callback([&] { run = [&] { return run_kmeans(g, km); }; });

  XorOpts xo;
  auto* c_x = app.add_subcommand("xor", "XOR difference and EDM error report of two images");
  c_x->add_option("query", xo.query, "Query image")->required();
  c_x->add_option("reference", xo.reference, "Reference image")->required();
  c_x->add_option("--out,-o", xo.out, "Write the difference image");
  c_x->add_flag("--align", xo.align, "Tight-crop and center both first");
  c_x->add_option("--threshold", xo.threshold, "otsu or a fixed gray level")->capture_default_str();
  c_x->callback([&] { run = [&] { return run_xor(g, xo); }; });

  KeypointOpts ko;
  auto* c_kp = app.add_subcommand("keypoints", "Keypoint list of an image");
  c_kp->add_option("image", ko.image, "Image")->required();
  c_kp->add_option("--detector", ko.detector, "sift|harris")->capture_default_str();
  c_kp->add_option("--max-keypoints", ko.max_keypoints, "Strongest keypoints kept (0: all)")->capture_default_str();
  c_kp->callback([&] { run = [&] { return run_keypoints(g, ko); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    rc = run();
  } catch (const palim::Error& e) {
    std::cerr << "palim: " << e.what() << '\n';
    rc = exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "palim: " << e.what() << '\n';
    rc = kExitUsage;
  }
  std::cout.flush();
  return rc;
}
