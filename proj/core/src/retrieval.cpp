#include "palim/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "palim/error.hpp"
#include "palim/image_io.hpp"
#include "palim/parallel.hpp"

namespace palim {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base) {
  Manifest out;
  std::set<std::string> ids;
  std::set<std::filesystem::path> paths;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw_error(ErrorCode::format, "manifest line " + std::to_string(line_no) + ": expected id<TAB>path[<TAB>label]");
    }
    ManifestEntry e{std::string(fields[0]), std::filesystem::path(std::string(fields[1])),
                    fields.size() == 3 ? std::string(fields[2]) : std::string()};
    if (e.path.is_relative() && !base.empty()) e.path = base / e.path;
    if (!ids.insert(e.id).second) throw_error(ErrorCode::format, "duplicate manifest id '" + e.id + "'");
    if (!paths.insert(e.path.lexically_normal()).second) {
      throw_error(ErrorCode::format, "duplicate manifest path '" + e.path.string() + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

const IndexRecord* Index::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::uint64_t image_digest(const GrayImage& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int v : {g.width(), g.height()}) {
    for (int i = 0; i < 4; ++i) feed(static_cast<std::uint8_t>(static_cast<std::uint32_t>(v) >> (8 * i)));
  }
  for (auto b : g.pixels()) feed(b);
  return h;
}

IndexRecord make_record(std::string id, std::string label, const GrayImage& page, const IndexConfig& config) {
  IndexRecord r;
  r.id = std::move(id);
  r.label = std::move(label);
  const GrayImage norm = normalize(page, config.normalization);
  r.width = norm.width();
  r.height = norm.height();
  r.digest = image_digest(norm);
  const BinaryImage bin = binarize(norm, config.fd.binarization);
  r.signature = fd_signature(norm, bin, config.fd);
  if (config.pseudowords) {
    for (const auto& pw : page_pseudowords(bin, *config.pseudowords)) r.pseudowords.push_back(pw.box);
  }
  r.features = extract_features(norm, config.features);
  return r;
}

Index build_index(const Manifest& manifest, const IndexConfig& config, const BuildOptions& options,
                  std::vector<std::string>* warnings) {
  std::set<std::string> ids;
  for (const auto& e : manifest) {
    if (!ids.insert(e.id).second) throw_error(ErrorCode::format, "duplicate manifest id '" + e.id + "'");
  }
  std::vector<std::optional<IndexRecord>> slots(manifest.size());
  std::vector<std::string> skipped(manifest.size());
  parallel_for(manifest.size(), options.threads, [&](std::size_t i) {
    const auto& e = manifest[i];
    GrayImage img;
    try {
      img = load_image(e.path);
    } catch (const Error& err) {
      if (!options.skip_unreadable) throw;
      skipped[i] = e.id + ": " + err.what();
      return;
    }
    slots[i] = make_record(e.id, e.label, img, config);
  });
  Index index;
  index.config = config;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      index.records.push_back(std::move(*slots[i]));
    } else if (warnings) {
      warnings->push_back("skipped " + skipped[i]);
    }
  }
  return index;
}

bool verify_digest(const IndexRecord& record, const GrayImage& page, const NormalizationParams& params) {
  return image_digest(normalize(page, params)) == record.digest;
}

double fd_distance(const FdSignature& a, const FdSignature& b, const FdTolerance& tol) {
  double s = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    if (!tol.enabled[m]) continue;
    const double d = a.dimension[m] - b.dimension[m];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<std::size_t> reject_by_fd(const Index& index, const FdSignature& query, const FdTolerance& tol) {
  for (double t : tol.tau) {
    if (!(t >= 0.0)) throw_error(ErrorCode::invalid_argument, "tau must be >= 0");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    const auto& sig = index.records[i].signature;
    bool keep = true;
    for (std::size_t m = 0; m < 4 && keep; ++m) {
      if (tol.enabled[m] && !(std::abs(sig.dimension[m] - query.dimension[m]) <= tol.tau[m])) keep = false;
    }
    if (keep) out.push_back(i);
  }
  return out;
}

RankedResults query(const Index& index, const GrayImage& query_image, const QueryParams& params, std::string query_id) {
  if (index.records.empty()) throw_error(ErrorCode::invalid_argument, "empty index");
  RankedResults res;
  res.query_id = std::move(query_id);
  res.candidates_in = index.records.size();

  const auto& cfg = index.config;
  GrayImage q = params.block_mode ? query_image : normalize(query_image, cfg.normalization);
  const BinaryImage qb = binarize(q, cfg.fd.binarization);
  if (qb.count() == 0) throw_error(ErrorCode::domain, "no foreground");

  std::vector<double> dist(index.records.size(), 0.0);
  if (params.block_mode) {
    res.survivors.resize(index.records.size());
    for (std::size_t i = 0; i < res.survivors.size(); ++i) res.survivors[i] = i;
  } else {
    const FdSignature sig = fd_signature(q, qb, cfg.fd);
    res.survivors = reject_by_fd(index, sig, params.tolerance);
    for (auto i : res.survivors) dist[i] = fd_distance(sig, index.records[i].signature, params.tolerance);
  }
  res.candidates_out = res.survivors.size();

  const Features qf = extract_features(q, cfg.features);
  std::vector<RankedResult> scored(res.survivors.size());
  parallel_for(res.survivors.size(), params.threads, [&](std::size_t k) {
    const auto& rec = index.records[res.survivors[k]];
    const auto matches = matched_points(match_descriptors(qf.descriptors, rec.features.descriptors, params.match));
    const std::size_t denom = params.block_mode
                                  ? std::max<std::size_t>(1, qf.descriptors.size())
                                  : std::max<std::size_t>(1, std::min(qf.descriptors.size(), rec.features.descriptors.size()));
    scored[k] = {rec.id, static_cast<double>(matches) / static_cast<double>(denom), dist[res.survivors[k]], matches};
  });
  std::sort(scored.begin(), scored.end(), [](const RankedResult& a, const RankedResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.fd_distance != b.fd_distance) return a.fd_distance < b.fd_distance;
    return a.id < b.id;
  });
  if (params.top_n > 0) {
    if (scored.size() > params.top_n) scored.resize(params.top_n);
  } else {
    scored.erase(std::find_if(scored.begin(), scored.end(), [](const RankedResult& r) { return !(r.score > 0.0); }),
                 scored.end());
  }
  res.results = std::move(scored);
  return res;
}

}  // namespace palim
