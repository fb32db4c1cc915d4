#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "check.hpp"
#include "oracles.hpp"
#include "palim/corpus.hpp"
#include "palim/image_io.hpp"
#include "palim/retrieval.hpp"

using namespace palim;
namespace fs = std::filesystem;

namespace {

IndexConfig small_config() {
  IndexConfig cfg;
  cfg.normalization = {256, 256, 300};
  cfg.features.max_keypoints = 200;
  return cfg;
}

Index in_memory_index(const std::vector<GrayImage>& pages, const IndexConfig& cfg) {
  Index idx;
  idx.config = cfg;
  for (std::size_t i = 0; i < pages.size(); ++i)
    idx.records.push_back(make_record("doc" + std::to_string(i), "", pages[i], cfg));
  return idx;
}

// Pages are shared across tests; building records dominates the runtime.
const std::vector<GrayImage>& pages() {
  static const auto p = document_set(8, 77);
  return p;
}

const Index& shared_index() {
  static const Index idx = in_memory_index(pages(), small_config());
  return idx;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string write_pages(const fs::path& dir, const std::vector<GrayImage>& imgs) {
  std::string manifest = "# id\tpath\tlabel\n";
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const auto name = "p" + std::to_string(i) + ".pgm";
    save_pgm(dir / name, imgs[i]);
    manifest += "doc" + std::to_string(i) + "\t" + name + "\tclass" + std::to_string(i % 2) + "\n";
  }
  return manifest;
}

PageStyle class_style(int cls) {
  PageStyle s;
  if (cls == 0) {
    s.scale = 2;
    s.margin = 16;
    s.line_pitch = 11;
  } else {
    s.scale = 4;
    s.margin = 48;
    s.line_pitch = 16;
    s.line_fill = 0.7;
  }
  return s;
}

GrayImage class_page(int cls, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return text_page(class_style(cls), rng);
}

}  // namespace

TEST(Manifest, Parse) {
  const auto m = parse_manifest("# header\n\na\tx.pgm\tlabel a\nb\t/abs/y.pgm\n", "/base");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].id, "a");
  EXPECT_EQ(m[0].path, fs::path("/base/x.pgm"));
  EXPECT_EQ(m[0].label, "label a");
  EXPECT_EQ(m[1].path, fs::path("/abs/y.pgm"));
  EXPECT_EQ(m[1].label, "");
  EXPECT_TRUE(parse_manifest("").empty());
}

TEST(Manifest, Errors) {
  EXPECT_EQ(test::error_code([] { parse_manifest("a\tx\nb\tx\n"); }), ErrorCode::format);
  EXPECT_EQ(test::error_code([] { parse_manifest("a\tx\na\ty\n"); }), ErrorCode::format);
  EXPECT_EQ(test::error_code([] { parse_manifest("just-an-id\n"); }), ErrorCode::format);
  EXPECT_EQ(test::error_code([] { read_manifest("/nonexistent/manifest.tsv"); }), ErrorCode::io);
}

TEST(Index, EmptyManifestGivesValidEmptyIndex) {
  const auto idx = build_index({}, IndexConfig{});
  EXPECT_TRUE(idx.records.empty());
  const auto bytes = serialize_index(idx);
  const std::string head(bytes.begin(), bytes.begin() + 11);
  EXPECT_EQ(head, "PALIMIDX 1\n");
  EXPECT_TRUE(parse_index(bytes).records.empty());
  EXPECT_EQ(test::error_code([&] { query(idx, pages()[0]); }), ErrorCode::invalid_argument);
}

TEST(Index, BuildIsDeterministicAcrossRunsAndThreads) {
  const auto dir = fresh_dir("palim_test_index_det");
  const std::vector<GrayImage> imgs(pages().begin(), pages().begin() + 3);
  const auto manifest = parse_manifest(write_pages(dir, imgs), dir);
  const auto cfg = small_config();
  const auto a = serialize_index(build_index(manifest, cfg));
  const auto b = serialize_index(build_index(manifest, cfg));
  BuildOptions threaded;
  threaded.threads = 3;
  const auto c = serialize_index(build_index(manifest, cfg, threaded));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  const auto idx = parse_index(a);
  ASSERT_EQ(idx.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(idx.records[i].id, "doc" + std::to_string(i));
    EXPECT_EQ(idx.records[i].label, "class" + std::to_string(i % 2));
    EXPECT_TRUE(verify_digest(idx.records[i], imgs[i], cfg.normalization));
    EXPECT_FALSE(verify_digest(idx.records[i], imgs[(i + 1) % 3], cfg.normalization));
  }
  fs::remove_all(dir);
}

TEST(Index, UnreadableEntries) {
  const auto dir = fresh_dir("palim_test_index_skip");
  auto text = write_pages(dir, {pages()[0]});
  text += "ghost\tmissing.pgm\n";
  const auto manifest = parse_manifest(text, dir);
  EXPECT_EQ(test::error_code([&] { build_index(manifest, small_config()); }), ErrorCode::io);
  BuildOptions skip;
  skip.skip_unreadable = true;
  std::vector<std::string> warnings;
  const auto idx = build_index(manifest, small_config(), skip, &warnings);
  EXPECT_EQ(idx.records.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("ghost"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Index, SerializationRoundTrip) {
  auto cfg = small_config();
  cfg.fd_enabled = {true, false, true, true};
  cfg.fd.box_sizes = {1, 2, 4, 8};
  cfg.pseudowords = corpus_segment_params(2);
  Index idx = in_memory_index({pages()[0], pages()[1]}, cfg);
  idx.records[1].label = "with\ttab and unicode \xc3\xa9";
  const auto bytes = serialize_index(idx);
  const auto back = parse_index(bytes);
  EXPECT_EQ(back.records, idx.records);
  EXPECT_EQ(back.config.fd_enabled, cfg.fd_enabled);
  EXPECT_EQ(back.config.fd.box_sizes, cfg.fd.box_sizes);
  ASSERT_TRUE(back.config.pseudowords.has_value());
  EXPECT_EQ(back.config.pseudowords->word_gap, cfg.pseudowords->word_gap);
  EXPECT_EQ(serialize_index(back), bytes);
  EXPECT_FALSE(idx.records[0].pseudowords.empty());

  const auto dir = fresh_dir("palim_test_index_io");
  save_index(dir / "x.idx", idx);
  EXPECT_EQ(serialize_index(load_index(dir / "x.idx")), bytes);
  fs::remove_all(dir);
}

TEST(Index, ParseErrors) {
  auto bytes = serialize_index(shared_index());
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_EQ(test::error_code([&] { parse_index(bad); }), ErrorCode::format);
  auto v2 = bytes;
  v2[9] = '2';
  EXPECT_NE(test::error_message([&] { parse_index(v2); }).find("unsupported index version"), std::string::npos);
  for (std::size_t cut : {bytes.size() / 3, bytes.size() / 2, bytes.size() - 5}) {
    const std::vector<std::uint8_t> trunc(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_EQ(test::error_code([&] { parse_index(trunc); }), ErrorCode::format) << cut;
  }
  EXPECT_EQ(test::error_code([] { parse_index({}); }), ErrorCode::format);
}

TEST(Index, RecordInvariants) {
  for (const auto& r : shared_index().records) {
    EXPECT_EQ(r.features.keypoints.size(), r.features.descriptors.size());
    EXPECT_LE(r.features.keypoints.size(), 200u);
    EXPECT_EQ(r.width, 256);
    for (double d : r.signature.dimension) EXPECT_TRUE(std::isfinite(d));
  }
}

TEST(Reject, InfiniteToleranceKeepsAll) {
  const auto& idx = shared_index();
  EXPECT_EQ(reject_by_fd(idx, idx.records[0].signature, FdTolerance{}).size(), idx.records.size());
}

TEST(Reject, SelfSurvivesZeroTolerance) {
  const auto& idx = shared_index();
  FdTolerance zero;
  zero.tau = {0, 0, 0, 0};
  for (std::size_t i = 0; i < idx.records.size(); ++i) {
    const auto s = reject_by_fd(idx, idx.records[i].signature, zero);
    EXPECT_NE(std::find(s.begin(), s.end(), i), s.end());
  }
}

TEST(Reject, MonotoneInTau) {
  const auto& idx = shared_index();
  std::mt19937_64 rng(80);
  for (int trial = 0; trial < 300; ++trial) {
    FdTolerance lo;
    for (int m = 0; m < 4; ++m) {
      lo.tau[m] = 0.2 * test::uniform01(rng);
      lo.enabled[m] = test::pick(rng, 4) != 0;
    }
    FdTolerance hi = lo;
    for (int m = 0; m < 4; ++m) hi.tau[m] += 0.2 * test::uniform01(rng);
    const auto& q = idx.records[test::pick(rng, idx.records.size())].signature;
    const auto a = reject_by_fd(idx, q, lo);
    const auto b = reject_by_fd(idx, q, hi);
    ASSERT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST(Reject, DisabledMethodIsIgnoredAndNegativeTauRejected) {
  const auto& idx = shared_index();
  FdTolerance t;
  t.tau = {0, 0, 0, 0};
  t.enabled = {false, false, false, false};
  EXPECT_EQ(reject_by_fd(idx, FdSignature{}, t).size(), idx.records.size());
  EXPECT_EQ(fd_distance(idx.records[0].signature, idx.records[1].signature, t), 0.0);
  t.tau[2] = -1;
  EXPECT_EQ(test::error_code([&] { reject_by_fd(idx, FdSignature{}, t); }), ErrorCode::invalid_argument);
}

TEST(Query, SelfRetrievalAndSubsetOfSurvivors) {
  const auto& idx = shared_index();
  std::mt19937_64 rng(81);
  for (std::size_t i = 0; i < pages().size(); ++i) {
    QueryParams qp;
    for (int m = 0; m < 4; ++m) qp.tolerance.tau[m] = 0.05 + 0.1 * test::uniform01(rng);
    const auto res = query(idx, pages()[i], qp, "q");
    ASSERT_FALSE(res.results.empty());
    EXPECT_EQ(res.results[0].id, idx.records[i].id);
    EXPECT_GT(res.results[0].score, 0.5);
    EXPECT_EQ(res.candidates_in, idx.records.size());
    EXPECT_EQ(res.candidates_out, res.survivors.size());
    std::set<std::string> survivors;
    for (auto s : res.survivors) survivors.insert(idx.records[s].id);
    for (std::size_t k = 0; k < res.results.size(); ++k) {
      EXPECT_TRUE(survivors.count(res.results[k].id));
      EXPECT_GT(res.results[k].score, 0.0);
      if (k > 0) {
        const auto& a = res.results[k - 1];
        const auto& b = res.results[k];
        EXPECT_TRUE(a.score > b.score || (a.score == b.score && (a.fd_distance < b.fd_distance ||
                                                                  (a.fd_distance == b.fd_distance && a.id < b.id))));
      }
    }
  }
}

TEST(Query, NoisyCopyFindsSource) {
  const auto& idx = shared_index();
  for (std::size_t i = 0; i < pages().size(); ++i) {
    const auto res = query(idx, add_salt_pepper(pages()[i], 0.02, 500 + i));
    ASSERT_FALSE(res.results.empty());
    EXPECT_EQ(res.results[0].id, idx.records[i].id);
  }
}

TEST(Query, TopNAndErrors) {
  const auto& idx = shared_index();
  QueryParams qp;
  qp.top_n = 3;
  EXPECT_EQ(query(idx, pages()[2], qp).results.size(), 3u);
  qp.top_n = 100;
  EXPECT_EQ(query(idx, pages()[2], qp).results.size(), idx.records.size());
  EXPECT_NE(test::error_message([&] { query(idx, GrayImage(300, 300, 255)); }).find("no foreground"),
            std::string::npos);
  EXPECT_EQ(test::error_code([&] { query(idx, GrayImage(300, 300, 255)); }), ErrorCode::domain);
}

TEST(Query, BlockMode) {
  const auto& idx = shared_index();
  const auto norm = normalize(pages()[4], idx.config.normalization);
  const auto block = crop(norm, Box{40, 40, 120, 120});
  QueryParams qp;
  qp.block_mode = true;
  qp.tolerance.tau = {0, 0, 0, 0};
  const auto res = query(idx, block, qp);
  EXPECT_EQ(res.candidates_out, idx.records.size());
  ASSERT_FALSE(res.results.empty());
  EXPECT_EQ(res.results[0].id, "doc4");
}

TEST(Query, ThreadCountDoesNotChangeResults) {
  const auto& idx = shared_index();
  QueryParams one, many;
  many.threads = 4;
  const auto a = query(idx, pages()[5], one);
  const auto b = query(idx, pages()[5], many);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].id, b.results[i].id);
    EXPECT_EQ(a.results[i].score, b.results[i].score);
  }
}

// Two visually distinct classes: dense small print and sparse large print.
// One held-out page per class calibrates tau: the method separating them most
// is enabled with tau at half their gap.
TEST(Reject, TwoClassCalibration) {
  IndexConfig cfg = small_config();
  cfg.features.max_keypoints = 50;
  const FdSignature held_a = fd_signature(normalize(class_page(0, 900), cfg.normalization), cfg.fd);
  const FdSignature held_b = fd_signature(normalize(class_page(1, 901), cfg.normalization), cfg.fd);
  FdTolerance tol;
  tol.enabled = {false, false, false, false};
  std::size_t best = 0;
  for (std::size_t m = 1; m < 4; ++m)
    if (std::abs(held_a.dimension[m] - held_b.dimension[m]) > std::abs(held_a.dimension[best] - held_b.dimension[best]))
      best = m;
  tol.enabled[best] = true;
  tol.tau[best] = 0.5 * std::abs(held_a.dimension[best] - held_b.dimension[best]);

  std::vector<GrayImage> imgs;
  for (int i = 0; i < 6; ++i) imgs.push_back(class_page(0, 100 + i));
  for (int i = 0; i < 6; ++i) imgs.push_back(class_page(1, 200 + i));
  const auto idx = in_memory_index(imgs, cfg);
  for (int cls = 0; cls < 2; ++cls) {
    for (std::uint64_t s : {300u, 301u, 302u}) {
      const auto q = fd_signature(normalize(class_page(cls, s + 10 * cls), cfg.normalization), cfg.fd);
      const auto survivors = reject_by_fd(idx, q, tol);
      std::size_t same = 0, other = 0;
      for (auto i : survivors) (static_cast<int>(i) / 6 == cls ? same : other)++;
      EXPECT_EQ(same, 6u) << "class " << cls;
      EXPECT_LE(other, 3u) << "class " << cls;
    }
  }
}
